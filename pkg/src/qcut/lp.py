"""Dense two-phase simplex with Bland's rule.

Solves  min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
Small and dependency-free; meant for the desk-scale LPs of the cut module.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-10

OPTIMAL, ITERATION_LIMIT, INFEASIBLE, UNBOUNDED = 0, 1, 2, 3
STATUS_TEXT = {OPTIMAL: "optimal", ITERATION_LIMIT: "iteration limit",
               INFEASIBLE: "infeasible", UNBOUNDED: "unbounded"}


class LPResult(NamedTuple):
    x: np.ndarray
    fun: float
    status: int
    iterations: int

    @property
    def success(self) -> bool:
        return self.status == OPTIMAL

    @property
    def message(self) -> str:
        return STATUS_TEXT[self.status]


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    nz = np.flatnonzero(np.abs(col_vals) > 0)
    if nz.size:
        T[nz] -= np.outer(col_vals[nz], T[row])


def _run(T: np.ndarray, basis: np.ndarray, allowed: np.ndarray, max_iter: int):
    """Bland's rule on tableau T whose last row holds reduced costs."""
    it = 0
    m = T.shape[0] - 1
    while it < max_iter:
        red = T[-1, :-1]
        cand = np.flatnonzero((red < -FEAS_TOL) & allowed)
        if cand.size == 0:
            return OPTIMAL, it
        col = int(cand[0])
        colv = T[:m, col]
        pos = colv > PIVOT_TOL
        if not pos.any():
            return UNBOUNDED, it
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / colv[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, abs(best)))
        row = int(ties[np.argmin(basis[ties])])
        _pivot(T, row, col)
        basis[row] = col
        it += 1
    return ITERATION_LIMIT, it


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_iter: int = 100000) -> LPResult:
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).reshape(-1)
    A_eq = np.zeros((0, nv)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, nv)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    mu, me = A_ub.shape[0], A_eq.shape[0]
    m = mu + me
    # columns: original | slacks (one per inequality) | artificials
    A = np.zeros((m, nv + mu))
    A[:mu, :nv] = A_ub
    A[:mu, nv:] = np.eye(mu)
    A[mu:, :nv] = A_eq
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1
    b = np.where(neg, -b, b)
    need_art = np.ones(m, dtype=bool)
    need_art[:mu] = neg[:mu]
    art_rows = np.flatnonzero(need_art)
    na = art_rows.size
    ncols = nv + mu + na
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :nv + mu] = A
    T[art_rows, nv + mu + np.arange(na)] = 1.0
    T[:m, -1] = b
    basis = np.empty(m, dtype=np.int64)
    basis[:mu] = nv + np.arange(mu)
    basis[art_rows] = nv + mu + np.arange(na)
    iters = 0
    if na:
        T[-1, :] = 0.0
        T[-1, nv + mu:ncols] = 1.0
        T[-1] -= T[art_rows].sum(axis=0)
        allowed = np.ones(ncols, dtype=bool)
        status, it = _run(T, basis, allowed, max_iter)
        iters += it
        if status == ITERATION_LIMIT:
            return LPResult(np.zeros(nv), np.nan, status, iters)
        if -T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
            return LPResult(np.zeros(nv), np.nan, INFEASIBLE, iters)
        # drive artificials out of the basis; drop redundant rows
        keep = np.ones(m + 1, dtype=bool)
        for r in range(m):
            if basis[r] >= nv + mu:
                cols = np.flatnonzero(np.abs(T[r, :nv + mu]) > PIVOT_TOL)
                if cols.size:
                    _pivot(T, r, int(cols[0]))
                    basis[r] = int(cols[0])
                else:
                    keep[r] = False
        T = T[keep]
        basis = basis[keep[:m]]
        T = np.delete(T, np.arange(nv + mu, ncols), axis=1)
    ncols = nv + mu
    m = T.shape[0] - 1
    T[-1, :] = 0.0
    T[-1, :nv] = c
    for r in range(m):
        cb = T[-1, basis[r]]
        if cb != 0.0:
            T[-1] -= cb * T[r]
    status, it = _run(T, basis, np.ones(ncols, dtype=bool), max_iter)
    iters += it
    x = np.zeros(ncols)
    x[basis] = T[:m, -1]
    x = np.maximum(x[:nv], 0.0)
    fun = float(c @ x) if status == OPTIMAL else (-np.inf if status == UNBOUNDED else np.nan)
    return LPResult(x, fun, status, iters)
