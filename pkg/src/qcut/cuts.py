"""Directed Multicut and uniform Sparsest Cut: LP relaxations, rounding, exhaustive oracles.

Both LPs use per-source potentials instead of path constraints. For every
source s there is a potential pi_s >= 0 with pi_s(s) = 0 and
pi_s(v) <= pi_s(u) + x(e) on every edge e = (u, v), so pi_s(v) <= d_x(s, v)
and the optimum equals the path formulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .core import TOL, Quasipartition, WeightedDigraph
from .lp import linprog
from .sampling.base import QuasipartitionDistribution


@dataclass(frozen=True, eq=False)
class CutInstance:
    graph: WeightedDigraph
    pairs: tuple
    demands: np.ndarray

    def __post_init__(self):
        pairs = tuple((int(s), int(t)) for s, t in self.pairs)
        dem = np.asarray(self.demands, dtype=float).reshape(-1)
        if len(dem) != len(pairs):
            raise ValueError("one demand per terminal pair")
        for s, t in pairs:
            if s == t:
                raise ValueError("terminal pair with s == t")
            if not (0 <= s < self.graph.n and 0 <= t < self.graph.n):
                raise ValueError("terminal out of range")
        if not np.all(np.isfinite(dem)) or np.any(dem < 0):
            raise ValueError("demands must be finite and >= 0")
        dem.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "demands", dem)

    @classmethod
    def uniform(cls, g: WeightedDigraph) -> "CutInstance":
        pairs = [(s, t) for s in range(g.n) for t in range(g.n) if s != t]
        return cls(g, tuple(pairs), np.ones(len(pairs)))

    @property
    def is_uniform(self) -> bool:
        n = self.graph.n
        return (len(self.pairs) == n * (n - 1) and len(set(self.pairs)) == len(self.pairs)
                and np.allclose(self.demands, self.demands[0] if len(self.demands) else 1.0))

    @property
    def sources(self) -> np.ndarray:
        return np.array(sorted({s for s, _ in self.pairs}), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class FractionalSolution:
    x: np.ndarray
    objective: float
    distances: np.ndarray
    status: str = "optimal"


class SparsityResult(NamedTuple):
    cost: float
    demand: float
    sparsity: float | None


@dataclass(frozen=True, eq=False)
class CutSolution:
    edges: tuple
    cost: float
    separated: tuple
    demand: float
    sparsity: float | None
    info: dict = field(default_factory=dict)

    @property
    def mask(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.int64)


def _edge_mask(g: WeightedDigraph, s) -> np.ndarray:
    mask = np.zeros(g.m, dtype=bool)
    s = np.asarray(list(s) if not isinstance(s, np.ndarray) else s)
    if s.dtype == bool:
        mask[:] = s
    elif s.size:
        mask[s.astype(np.int64)] = True
    return mask


def separated_pairs(inst: CutInstance, s) -> np.ndarray:
    g = inst.graph
    reach = _kernels.closure(g.n, g.tails, g.heads, ~_edge_mask(g, s))
    ps = np.array([p[0] for p in inst.pairs], dtype=np.int64)
    pt = np.array([p[1] for p in inst.pairs], dtype=np.int64)
    return ~reach[ps, pt] if len(ps) else np.zeros(0, dtype=bool)


def sparsity(inst: CutInstance, s) -> SparsityResult:
    """(C, D, C/D); the ratio is None when nothing is separated."""
    mask = _edge_mask(inst.graph, s)
    c = float(inst.graph.capacities[mask].sum())
    d = float(inst.demands[separated_pairs(inst, mask)].sum())
    return SparsityResult(c, d, c / d if d > 0 else None)


def cut_solution(inst: CutInstance, s, **info) -> CutSolution:
    mask = _edge_mask(inst.graph, s)
    sep = separated_pairs(inst, mask)
    c, d, w = sparsity(inst, mask)
    return CutSolution(tuple(int(e) for e in np.flatnonzero(mask)), c,
                       tuple(int(i) for i in np.flatnonzero(sep)), d, w, dict(info))


# --------------------------------------------------------------------------
# LP relaxations
# --------------------------------------------------------------------------


def _potential_lp(inst: CutInstance, sources: np.ndarray):
    """Columns x(e) then pi_s(v) for v != s; rows pi_s(v) - pi_s(u) - x(e) <= 0."""
    g = inst.graph
    n, m = g.n, g.m
    col = {}
    nv = m
    for s in sources:
        for v in range(n):
            if v != s:
                col[(int(s), v)] = nv
                nv += 1
    rows = []
    for s in sources:
        s = int(s)
        for e in range(m):
            u, v = int(g.tails[e]), int(g.heads[e])
            if v == s:
                continue  # pi_s(s) = 0 makes this row trivially satisfied
            r = np.zeros(nv)
            r[col[(s, v)]] = 1.0
            if u != s:
                r[col[(s, u)]] -= 1.0
            r[e] = -1.0
            rows.append(r)
    return col, nv, rows


def _fractional(inst: CutInstance, res, m: int) -> FractionalSolution:
    g = inst.graph
    if not res.success:
        raise RuntimeError(f"LP solve failed: {res.message}")
    x = res.x[:m].copy()
    d = _kernels.apsp(g.n, g.tails, g.heads, x)
    x.setflags(write=False)
    d.setflags(write=False)
    return FractionalSolution(x, float(g.capacities @ x), d, res.message)


def solve_multicut_lp(inst: CutInstance, eps: float = 1e-6) -> FractionalSolution:
    """min sum c(e) x(e) subject to d_x(s_i, t_i) >= 1 for every pair."""
    if not inst.pairs:
        raise ValueError("multicut needs at least one terminal pair")
    g = inst.graph
    col, nv, rows = _potential_lp(inst, inst.sources)
    b = [0.0] * len(rows)
    for s, t in inst.pairs:
        r = np.zeros(nv)
        r[col[(s, t)]] = -1.0
        rows.append(r)
        b.append(-1.0)
    c = np.zeros(nv)
    c[:g.m] = g.capacities
    res = linprog(c, np.array(rows), np.array(b))
    return _fractional(inst, res, g.m)


def solve_sparsest_cut_lp(inst: CutInstance, eps: float = 1e-6) -> FractionalSolution:
    """min sum c(e) x(e) subject to sum dem(i) d_x(s_i, t_i) >= 1."""
    if not inst.demands.sum() > 0:
        raise ValueError("total demand must be positive")
    g = inst.graph
    col, nv, rows = _potential_lp(inst, inst.sources)
    b = [0.0] * len(rows)
    r = np.zeros(nv)
    for (s, t), dm in zip(inst.pairs, inst.demands):
        r[col[(s, t)]] -= dm
    rows.append(r)
    b.append(-1.0)
    c = np.zeros(nv)
    c[:g.m] = g.capacities
    res = linprog(c, np.array(rows), np.array(b))
    return _fractional(inst, res, g.m)


def lp_feasibility(inst: CutInstance, frac: FractionalSolution, kind: str) -> float:
    """Smallest terminal distance (multicut) or the demand-weighted sum (sparsest)."""
    d = frac.distances
    vals = np.array([d[s, t] for s, t in inst.pairs])
    if kind == "multicut":
        return float(vals.min())
    return float(np.sum(inst.demands * vals))


# --------------------------------------------------------------------------
# rounding
# --------------------------------------------------------------------------


def _candidates(dist, samples: int, seed: int):
    if isinstance(dist, QuasipartitionDistribution):
        if dist.is_explicit:
            return [q for q, _ in dist.members], np.array([p for _, p in dist.members])
        qs = dist.draw(samples, seed)
        return qs, np.full(len(qs), 1.0 / len(qs))
    qs = list(dist)
    return qs, np.full(len(qs), 1.0 / max(1, len(qs)))


def _cut_of(g: WeightedDigraph, q: Quasipartition) -> np.ndarray:
    return ~q.rel[g.tails, g.heads]


def _lipschitz_on_edges(g, d, qs, probs, r):
    """Exact (or empirical) max over edges of Pr[e not in Q] * r / d(e)."""
    sep = np.zeros(g.m)
    for q, p in zip(qs, probs):
        sep += p * _cut_of(g, q)
    de = d[g.tails, g.heads]
    beta = 0.0
    for e in range(g.m):
        if sep[e] <= 0:
            continue
        if de[e] <= TOL:
            return np.inf, sep
        beta = max(beta, sep[e] * r / de[e])
    return beta, sep


def round_multicut(inst: CutInstance, dist, frac: FractionalSolution, eps: float = 1e-6,
                   samples: int = 200, seed: int = 0) -> CutSolution:
    """Best support member (or best of ``samples`` draws) as a multicut.

    Every candidate must be (1 - eps)-bounded for d_x; the measured beta is
    max over edges of Pr[e cut] * (1 - eps) / d_x(e), and the returned cost
    never exceeds the support's expected cost, hence beta / (1 - eps) * LP.
    """
    g = inst.graph
    d = frac.distances
    bound = 1.0 - eps
    qs, probs = _candidates(dist, samples, seed)
    if not qs:
        raise ValueError("empty distribution")
    for q in qs:
        rel = q.rel & ~np.eye(q.n, dtype=bool)
        if rel.any() and d[rel].max() > bound + TOL:
            raise ValueError("distribution is not (1 - eps)-bounded for the LP metric")
    beta, _ = _lipschitz_on_edges(g, d, qs, probs, bound)
    costs = np.array([g.capacities[_cut_of(g, q)].sum() for q in qs])
    best = int(np.argmin(costs))
    sol = cut_solution(inst, _cut_of(g, qs[best]), beta=beta, lp=frac.objective,
                       expected_cost=float(probs @ costs), support=len(qs))
    if len(sol.separated) < len(inst.pairs):
        raise AssertionError("rounded cut leaves a terminal pair connected")
    return sol


def _scc_labels(g: WeightedDigraph, keep: np.ndarray) -> np.ndarray:
    reach = _kernels.closure(g.n, g.tails, g.heads, keep)
    mutual = reach & reach.T
    labels = np.full(g.n, -1, dtype=np.int64)
    k = 0
    for v in range(g.n):
        if labels[v] < 0:
            labels[mutual[v]] = k
            k += 1
    return labels


def _ball_cuts(inst: CutInstance, core: np.ndarray, d: np.ndarray):
    """Cuts leaving out-balls and entering in-balls around a vertex set."""
    g = inst.graph
    out_d = d[core].min(axis=0)
    in_d = d[:, core].min(axis=1)
    found = []
    for dist_to, outward in ((out_d, True), (in_d, False)):
        radii = np.unique(dist_to[np.isfinite(dist_to)])
        for rho in radii:
            ball = dist_to <= rho + TOL
            if ball.all():
                continue
            if outward:
                cut = ball[g.tails] & ~ball[g.heads]
            else:
                cut = ~ball[g.tails] & ball[g.heads]
            found.append(cut)
    return found


def round_sparsest_cut(inst: CutInstance, dist, frac: FractionalSolution,
                       samples: int = 200, seed: int = 0) -> CutSolution:
    """Rounding for uniform demands from a 1/(4n^2)-bounded distribution.

    The cheapest candidate cut S* is analysed through the strongly connected
    components of G - S*. If every component has fewer than 2n/3 vertices,
    S* itself is returned. Otherwise ball cuts around the large component,
    with radii at every distance breakpoint, are compared with S* and the
    sparsest is returned.
    """
    if not inst.is_uniform:
        raise ValueError("sparsest-cut rounding needs uniform demands")
    g = inst.graph
    n = g.n
    d = frac.distances
    bound = 1.0 / (4.0 * n * n)
    qs, probs = _candidates(dist, samples, seed)
    for q in qs:
        rel = q.rel & ~np.eye(n, dtype=bool)
        if rel.any() and d[rel].max() > bound + TOL:
            raise ValueError("distribution is not 1/(4n^2)-bounded for the LP metric")
    beta, _ = _lipschitz_on_edges(g, d, qs, probs, bound)
    costs = np.array([g.capacities[_cut_of(g, q)].sum() for q in qs])
    best = int(np.argmin(costs))
    s_star = _cut_of(g, qs[best])
    labels = _scc_labels(g, ~s_star)
    sizes = np.bincount(labels)
    big = int(np.argmax(sizes))
    info = dict(beta=beta, lp=frac.objective, component_sizes=sorted(sizes.tolist(), reverse=True))
    if sizes[big] < 2 * n / 3:
        info["case"] = "balanced"
        # grouping components greedily reaches [n/6, 5n/6]
        acc, grouped = 0, []
        for lab in np.argsort(-sizes):
            if acc >= n / 6:
                break
            acc += sizes[lab]
            grouped.append(int(lab))
        info["group_size"] = int(acc)
        return cut_solution(inst, s_star, **info)
    info["case"] = "large-component"
    cands = [s_star] + _ball_cuts(inst, labels == big, d)
    scored = []
    for cut in cands:
        c, dm, w = sparsity(inst, cut)
        scored.append(np.inf if w is None else w)
    j = int(np.argmin(scored))
    info["ball_candidates"] = len(cands) - 1
    info["picked"] = "S*" if j == 0 else "ball"
    return cut_solution(inst, cands[j], **info)


# --------------------------------------------------------------------------
# exhaustive oracles
# --------------------------------------------------------------------------

MAX_MULTICUT_EDGES = 20
MAX_SPARSEST_VERTICES = 8


def _enumerate(inst: CutInstance):
    g = inst.graph
    ps = [p[0] for p in inst.pairs]
    pt = [p[1] for p in inst.pairs]
    return _kernels.enumerate_cuts(g.n, g.tails, g.heads, g.capacities, ps, pt, inst.demands)


def _mask_bits(m: int, mask: int) -> np.ndarray:
    return np.array([(mask >> e) & 1 for e in range(m)], dtype=bool)


def brute_force_multicut(inst: CutInstance) -> CutSolution:
    g = inst.graph
    if g.m > MAX_MULTICUT_EDGES:
        raise ValueError(f"brute force multicut is limited to {MAX_MULTICUT_EDGES} edges")
    mc_mask, _, _, _ = _enumerate(inst)
    return cut_solution(inst, _mask_bits(g.m, mc_mask), oracle="exhaustive")


def brute_force_sparsest_cut(inst: CutInstance) -> CutSolution:
    g = inst.graph
    if g.n > MAX_SPARSEST_VERTICES or g.m > _kernels.MAX_ENUM_EDGES:
        raise ValueError(f"brute force sparsest cut is limited to {MAX_SPARSEST_VERTICES} "
                         f"vertices and {_kernels.MAX_ENUM_EDGES} edges")
    _, _, sp_mask, _ = _enumerate(inst)
    if sp_mask < 0:
        raise ValueError("no cut separates any demand")
    return cut_solution(inst, _mask_bits(g.m, sp_mask), oracle="exhaustive")
