"""Compiled inner loops.

Every kernel exists twice: a numba version (loops, compiled with ``njit``)
and a vectorised numpy version. The numba path is used when numba imports
and ``QCUT_PURE_NUMPY`` is unset or false. Both paths return identical
results up to floating point rounding, which the test-suite checks.
"""

import os

import numpy as np

_FLAG = os.getenv("QCUT_PURE_NUMPY", "0").strip().lower()
PURE_NUMPY = _FLAG not in ("", "0", "false", "no", "off")

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not PURE_NUMPY

# Edge-subset enumeration packs reachability sets into int64 words.
MAX_ENUM_VERTICES = 62
MAX_ENUM_EDGES = 26


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------


def _apsp_numpy(n, tails, heads, weights):
    d = np.full((n, n), np.inf)
    if len(tails):
        np.minimum.at(d, (tails, heads), weights)
    d[np.arange(n), np.arange(n)] = 0.0
    for k in range(n):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def _closure_numpy(n, tails, heads, keep):
    r = np.eye(n, dtype=bool)
    r[tails[keep], heads[keep]] = True
    for k in range(n):
        r |= r[:, k, None] & r[None, k, :]
    return r


def _crossed_numpy(du, dv, z, period):
    du = np.asarray(du, dtype=float)
    dv = np.asarray(dv, dtype=float)
    out = np.zeros(du.shape, dtype=bool)
    ok = np.isfinite(du) & (dv > du)
    if not np.isfinite(period):
        out[ok] = (du[ok] <= z) & (z < dv[ok])
        return out
    i = np.maximum(0.0, np.ceil((du[ok] - z) / period))
    t = z + i * period
    t = np.where(t < du[ok], t + period, t)
    out[ok] = t < dv[ok]
    return out


def _enumerate_cuts_numpy(n, tails, heads, cost, ps, pt, dem, chunk=2048):
    m = len(tails)
    best_mc, best_mc_mask = np.inf, -1
    best_sp, best_sp_mask = np.inf, -1
    total = 1 << m
    bits = np.arange(m, dtype=np.int64)
    for lo in range(0, total, chunk):
        masks = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        cut = ((masks[:, None] >> bits[None, :]) & 1).astype(bool)
        b = len(masks)
        reach = np.zeros((b, n, n), dtype=bool)
        reach[:, np.arange(n), np.arange(n)] = True
        kept = ~cut
        for e in range(m):
            reach[kept[:, e], tails[e], heads[e]] = True
        for k in range(n):
            reach |= reach[:, :, k, None] & reach[:, None, k, :]
        c = cut.astype(float) @ cost
        sep = ~reach[:, ps, pt]
        dsep = sep.astype(float) @ dem
        valid = sep.all(axis=1)
        if valid.any():
            cand = np.where(valid, c, np.inf)
            j = int(np.argmin(cand))
            if cand[j] < best_mc:
                best_mc, best_mc_mask = cand[j], int(masks[j])
        pos = dsep > 0
        if pos.any():
            ratio = np.where(pos, c / np.where(pos, dsep, 1.0), np.inf)
            j = int(np.argmin(ratio))
            if ratio[j] < best_sp:
                best_sp, best_sp_mask = ratio[j], int(masks[j])
    return best_mc_mask, best_mc, best_sp_mask, best_sp


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _csr(n, tails, heads, keep):
        deg = np.zeros(n + 1, np.int64)
        for e in range(len(tails)):
            if keep[e]:
                deg[tails[e] + 1] += 1
        for v in range(n):
            deg[v + 1] += deg[v]
        nbr = np.empty(deg[n], np.int64)
        eid = np.empty(deg[n], np.int64)
        fill = deg[:-1].copy()
        for e in range(len(tails)):
            if keep[e]:
                nbr[fill[tails[e]]] = heads[e]
                eid[fill[tails[e]]] = e
                fill[tails[e]] += 1
        return deg, nbr, eid

    @njit(cache=True)
    def _heap_push(hd, hv, size, d, v):
        i = size
        hd[i] = d
        hv[i] = v
        while i > 0:
            p = (i - 1) // 2
            if hd[p] <= hd[i]:
                break
            hd[p], hd[i] = hd[i], hd[p]
            hv[p], hv[i] = hv[i], hv[p]
            i = p
        return size + 1

    @njit(cache=True)
    def _heap_pop(hd, hv, size):
        d0 = hd[0]
        v0 = hv[0]
        size -= 1
        hd[0] = hd[size]
        hv[0] = hv[size]
        i = 0
        while True:
            a = 2 * i + 1
            if a >= size:
                break
            b = a + 1
            c = a
            if b < size and hd[b] < hd[a]:
                c = b
            if hd[i] <= hd[c]:
                break
            hd[c], hd[i] = hd[i], hd[c]
            hv[c], hv[i] = hv[i], hv[c]
            i = c
        return d0, v0, size

    @njit(cache=True)
    def _apsp_numba(n, tails, heads, weights):
        keep = np.ones(len(tails), np.bool_)
        indptr, nbr, eid = _csr(n, tails, heads, keep)
        out = np.full((n, n), np.inf)
        cap = len(tails) + n + 1
        hd = np.empty(cap)
        hv = np.empty(cap, np.int64)
        done = np.zeros(n, np.bool_)
        for s in range(n):
            dist = out[s]
            done[:] = False
            dist[s] = 0.0
            size = _heap_push(hd, hv, 0, 0.0, s)
            while size > 0:
                d, u, size = _heap_pop(hd, hv, size)
                if done[u]:
                    continue
                done[u] = True
                for k in range(indptr[u], indptr[u + 1]):
                    v = nbr[k]
                    nd = d + weights[eid[k]]
                    if nd < dist[v]:
                        dist[v] = nd
                        size = _heap_push(hd, hv, size, nd, v)
        return out

    @njit(cache=True)
    def _closure_numba(n, tails, heads, keep):
        indptr, nbr, eid = _csr(n, tails, heads, keep)
        r = np.zeros((n, n), np.bool_)
        stack = np.empty(n, np.int64)
        for s in range(n):
            row = r[s]
            row[s] = True
            stack[0] = s
            top = 1
            while top > 0:
                top -= 1
                u = stack[top]
                for k in range(indptr[u], indptr[u + 1]):
                    v = nbr[k]
                    if not row[v]:
                        row[v] = True
                        stack[top] = v
                        top += 1
        return r

    @njit(cache=True)
    def _crossed_numba(du, dv, z, period):
        out = np.zeros(len(du), np.bool_)
        finite_period = np.isfinite(period)
        for e in range(len(du)):
            a = du[e]
            b = dv[e]
            if not np.isfinite(a) or not (b > a):
                continue
            if not finite_period:
                out[e] = a <= z and z < b
                continue
            i = np.ceil((a - z) / period)
            if i < 0.0:
                i = 0.0
            t = z + i * period
            if t < a:
                t += period
            out[e] = t < b
        return out

    @njit(cache=True)
    def _enumerate_cuts_numba(n, tails, heads, cost, ps, pt, dem):
        m = len(tails)
        best_mc = np.inf
        best_mc_mask = -1
        best_sp = np.inf
        best_sp_mask = -1
        reach = np.zeros(n, np.int64)
        for mask in range(1 << m):
            for v in range(n):
                reach[v] = np.int64(1) << v
            changed = True
            while changed:
                changed = False
                for e in range(m):
                    if (mask >> e) & 1:
                        continue
                    u = tails[e]
                    nu = reach[u] | reach[heads[e]]
                    if nu != reach[u]:
                        reach[u] = nu
                        changed = True
            c = 0.0
            for e in range(m):
                if (mask >> e) & 1:
                    c += cost[e]
            dsep = 0.0
            allsep = True
            for i in range(len(ps)):
                if (reach[ps[i]] >> pt[i]) & 1:
                    allsep = False
                else:
                    dsep += dem[i]
            if allsep and c < best_mc:
                best_mc = c
                best_mc_mask = mask
            if dsep > 0.0:
                ratio = c / dsep
                if ratio < best_sp:
                    best_sp = ratio
                    best_sp_mask = mask
        return best_mc_mask, best_mc, best_sp_mask, best_sp


# --------------------------------------------------------------------------
# public entry points
# --------------------------------------------------------------------------


def _edge_arrays(tails, heads):
    return (np.ascontiguousarray(tails, dtype=np.int64),
            np.ascontiguousarray(heads, dtype=np.int64))


def apsp(n: int, tails, heads, weights) -> np.ndarray:
    """All-pairs shortest path lengths, ``inf`` where unreachable."""
    tails, heads = _edge_arrays(tails, heads)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if n == 0:
        return np.zeros((0, 0))
    if USE_NUMBA:
        return _apsp_numba(n, tails, heads, weights)
    return _apsp_numpy(n, tails, heads, weights)


def closure(n: int, tails, heads, keep=None) -> np.ndarray:
    """Reflexive transitive closure of the kept edges as a boolean matrix."""
    tails, heads = _edge_arrays(tails, heads)
    if keep is None:
        keep = np.ones(len(tails), dtype=bool)
    keep = np.ascontiguousarray(keep, dtype=np.bool_)
    if n == 0:
        return np.zeros((0, 0), dtype=bool)
    if USE_NUMBA:
        return _closure_numba(n, tails, heads, keep)
    return _closure_numpy(n, tails, heads, keep)


def relation_closure(rel: np.ndarray) -> np.ndarray:
    rel = np.asarray(rel, dtype=bool)
    t, h = np.nonzero(rel)
    return closure(rel.shape[0], t, h)


def crossed(du, dv, z: float, period: float = np.inf) -> np.ndarray:
    """True where some threshold ``z + i*period`` (i >= 0) has du <= t < dv.

    With an infinite period only the single threshold ``z`` is used.
    """
    du = np.ascontiguousarray(du, dtype=np.float64)
    dv = np.ascontiguousarray(dv, dtype=np.float64)
    if USE_NUMBA:
        return _crossed_numba(du, dv, float(z), float(period))
    return _crossed_numpy(du, dv, float(z), float(period))


def enumerate_cuts(n, tails, heads, cost, pair_s, pair_t, dem):
    """Scan all edge subsets; return the cheapest multicut and sparsest cut.

    Returns ``(multicut_mask, multicut_cost, sparsest_mask, sparsity)``;
    masks are -1 when nothing qualifies.
    """
    tails, heads = _edge_arrays(tails, heads)
    if n > MAX_ENUM_VERTICES or len(tails) > MAX_ENUM_EDGES:
        raise ValueError("instance too large for exhaustive cut enumeration")
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    ps, pt = _edge_arrays(pair_s, pair_t)
    dem = np.ascontiguousarray(dem, dtype=np.float64)
    if USE_NUMBA:
        a, b, c, d = _enumerate_cuts_numba(n, tails, heads, cost, ps, pt, dem)
    else:
        a, b, c, d = _enumerate_cuts_numpy(n, tails, heads, cost, ps, pt, dem)
    return int(a), float(b), int(c), float(d)
