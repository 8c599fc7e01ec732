"""Random quasipartitions of bidirected cycles with an exact breakpoint law."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..core import TOL, Quasipartition, WeightedDigraph
from .base import QuasipartitionDistribution


class CycleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CycleLayout:
    """A bidirected cycle in clockwise order with meet-point subdivisions.

    Points are the cycle vertices plus up to two auxiliary subdivision
    points. Segment ``k`` joins point ``k`` to point ``k+1`` (cyclically);
    ``cw_w[k]`` is its clockwise weight and ``ccw_w[k]`` the weight of the
    reverse direction. ``seg_edge[k]`` is the source segment index j, where
    source segment j joins ``order[j]`` and ``order[j+1]``.
    """

    g: WeightedDigraph
    order: np.ndarray
    cw_edge: np.ndarray
    ccw_edge: np.ndarray
    delta: float
    point_vertex: np.ndarray
    cw_w: np.ndarray
    ccw_w: np.ndarray
    seg_edge: np.ndarray
    A: tuple
    B: tuple
    a1: int
    am: int
    meet1: int
    meetm: int

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def points(self) -> int:
        return len(self.point_vertex)

    def cw_pos(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.cw_w)])

    def ccw_pos(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.ccw_w)])

    def cw_dist(self, a: int, b: int) -> float:
        p = self.cw_pos()
        return float((p[b] - p[a]) % p[-1]) if a != b else 0.0

    def ccw_dist(self, a: int, b: int) -> float:
        q = self.ccw_pos()
        return float((q[a] - q[b]) % q[-1]) if a != b else 0.0


def _cycle_order(g: WeightedDigraph, start: int = 0):
    nb = g.undirected_neighbors()
    if g.n < 3:
        raise CycleError("a cycle needs at least three vertices")
    if any(len(s) != 2 for s in nb):
        raise CycleError("underlying undirected graph is not a cycle")
    order = [start]
    prev, cur = start, min(nb[start])
    while cur != start:
        order.append(cur)
        nxt = [v for v in nb[cur] if v != prev]
        prev, cur = cur, nxt[0]
        if len(order) > g.n:
            break
    if len(order) != g.n:
        raise CycleError("underlying undirected graph is not a single cycle")
    idx = g.edge_index()
    cw, ccw = [], []
    for j in range(g.n):
        a, b = order[j], order[(j + 1) % g.n]
        if (a, b) not in idx or (b, a) not in idx:
            raise CycleError("every cycle edge must be present in both directions")
        cw.append(idx[(a, b)])
        ccw.append(idx[(b, a)])
    return np.array(order), np.array(cw), np.array(ccw)


def _meet_point(cw_w, ccw_w, a: int):
    """(segment, fraction) where clockwise and counter-clockwise distances from a agree."""
    n = len(cw_w)
    lccw = ccw_w.sum()
    x = 0.0
    y_prev = lccw
    for k in range(1, n + 1):
        s = (a + k - 1) % n
        f, c = cw_w[s], ccw_w[s]
        x_new = x + f
        y_new = y_prev - c
        if x_new >= y_new - TOL * max(1.0, x_new):
            if abs(x_new - y_new) <= TOL * max(1.0, x_new):
                return s, 1.0
            alpha = (y_new + c - x) / (f + c) if f + c > 0 else 0.0
            return s, float(min(max(alpha, 0.0), 1.0))
        x, y_prev = x_new, y_new
    return (a - 1) % n, 1.0  # pragma: no cover


def cycle_layout(g: WeightedDigraph, start: int = 0) -> CycleLayout:
    order, cw, ccw = _cycle_order(g, start)
    d = g.distances
    n = g.n
    # every edge is treated as a shortest path
    cw_w = d[order, np.roll(order, -1)]
    ccw_w = d[np.roll(order, -1), order]
    delta = float(d.max())
    if not delta > 0:
        raise CycleError("cycle has zero diameter")
    gn = WeightedDigraph(n, g.tails, g.heads, d[g.tails, g.heads], g.capacities, g.labels)
    # short pairs in cycle positions
    P = np.concatenate([[0.0], np.cumsum(cw_w)])
    Qp = np.concatenate([[0.0], np.cumsum(ccw_w)])
    fw = (P[None, :n] - P[:n, None]) % P[-1]
    bw = (Qp[:n, None] - Qp[None, :n]) % Qp[-1]
    short = (fw < delta / 10) & (bw < delta / 10) & ~np.eye(n, dtype=bool)
    A = tuple(int(i) for i in np.flatnonzero(short.any(axis=1)))
    B = tuple(int(i) for i in np.flatnonzero(short.any(axis=0)))
    a1 = am = meet1 = meetm = -1
    splits = []
    if A:
        aset = set(A)
        starts = [a for a in A if (a - 1) % n not in aset]
        a1 = starts[0] if starts else A[0]
        am = a1
        while (am + 1) % n in aset and (am + 1) % n != a1:
            am = (am + 1) % n
        for tag, a in (("1", a1), ("m", am)):
            s, frac = _meet_point(cw_w, ccw_w, a)
            same = [sp for sp in splits if sp[0] == s and abs(sp[1] - frac) <= TOL]
            splits.append((s, same[0][1] if same else frac, tag))
    # apply splits in clockwise order along each segment
    pts_v = []
    seg_cw, seg_ccw, seg_src = [], [], []
    idx_of = {}
    for j in range(n):
        pts_v.append(j)
        here = sorted(((fr, tag) for s, fr, tag in splits if s == j), key=lambda t: t[0])
        f, c = cw_w[j], ccw_w[j]
        last = 0.0
        for fr, tag in here:
            if here and fr == last and last > 0:
                idx_of[tag] = len(pts_v) - 1
                continue
            if fr <= TOL:
                idx_of[tag] = len(pts_v) - 1
                continue
            if fr >= 1 - TOL:
                idx_of[tag] = ("next", j)
                continue
            seg_cw.append((fr - last) * f)
            seg_ccw.append((fr - last) * c)
            seg_src.append(j)
            pts_v.append(-1)
            idx_of[tag] = len(pts_v) - 1
            last = fr
        seg_cw.append((1 - last) * f)
        seg_ccw.append((1 - last) * c)
        seg_src.append(j)
    # remap vertex indices: point index of cycle position j
    pos_point = [i for i, v in enumerate(pts_v) if v >= 0]

    def resolve(v):
        if isinstance(v, tuple):
            return pos_point[(v[1] + 1) % n]
        return v

    if A:
        meet1 = resolve(idx_of["1"])
        meetm = resolve(idx_of["m"])
        a1 = pos_point[a1]
        am = pos_point[am]
    pv = np.array([order[v] if v >= 0 else -1 for v in pts_v], dtype=np.int64)
    return CycleLayout(gn, order, cw, ccw, delta, pv, np.array(seg_cw), np.array(seg_ccw),
                       np.array(seg_src), A, B, a1, am, meet1, meetm)


def structure_violations(lay: CycleLayout) -> list[str]:
    """A and B must be disjoint arcs of consecutive cycle positions."""
    issues = []
    n = lay.n
    if set(lay.A) & set(lay.B):
        issues.append("short-pair sources and sinks overlap")
    for name, s in (("A", set(lay.A)), ("B", set(lay.B))):
        if s and len(s) < n:
            runs = sum(1 for v in s if (v - 1) % n not in s)
            if runs != 1:
                issues.append(f"{name} is not a single arc")
    return issues


# --------------------------------------------------------------------------
# threshold conditions
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Conditions:
    """Removal rules as (segment, direction, low, high) rows.

    Direction 0 is clockwise, 1 counter-clockwise. A row fires when some
    threshold t satisfies low <= t < high; first-phase rows use periodic
    thresholds z1 + i*delta/10, second-phase rows the single threshold z3.
    """

    lay: CycleLayout
    phase1: np.ndarray
    phase2: np.ndarray


def _conditions(lay: CycleLayout) -> _Conditions:
    N = lay.points
    P = lay.cw_pos()
    Qp = lay.ccw_pos()
    Lccw = Qp[-1]
    rows1 = []
    # clockwise segment k: from P[k] to P[k+1] (the last ends at the full length)
    for k in range(N):
        rows1.append((k, 0, P[k], P[k + 1]))
    # counter-clockwise segment k runs point k+1 -> point k; distance from
    # point 0 going counter-clockwise to point j is Lccw - Qp[j] (0 for j = 0)
    back = np.where(np.arange(N + 1) == 0, Lccw, Lccw - Qp)
    back[N] = 0.0
    for k in range(N):
        rows1.append((k, 1, back[k + 1], back[k]))
    rows2 = []
    if lay.a1 >= 0:
        for a, mp in ((lay.a1, lay.meet1), (lay.am, lay.meetm)):
            # clockwise path a -> mp
            k = a
            dist = 0.0
            cw_segs = []
            while k != mp:
                cw_segs.append((k, dist, dist + lay.cw_w[k]))
                dist += lay.cw_w[k]
                k = (k + 1) % N
            # counter-clockwise path a -> mp
            k = a
            dist = 0.0
            ccw_segs = []
            while k != mp:
                s = (k - 1) % N
                ccw_segs.append((s, dist, dist + lay.ccw_w[s]))
                dist += lay.ccw_w[s]
                k = s
            lcw = sum(lay.cw_w[s] for s, _, _ in cw_segs)
            lccw = sum(lay.ccw_w[s] for s, _, _ in ccw_segs)
            for s, lo, hi in cw_segs:
                rows2.append((s, 0, lo, hi))              # distance from a
                rows2.append((s, 0, lcw - hi, lcw - lo))  # distance to the meet-point
            for s, lo, hi in ccw_segs:
                rows2.append((s, 1, lo, hi))
                rows2.append((s, 1, lccw - hi, lccw - lo))
    return _Conditions(lay, np.array(rows1, dtype=float).reshape(-1, 4),
                       np.array(rows2, dtype=float).reshape(-1, 4))


def _fire(rows: np.ndarray, z: float, period: float) -> np.ndarray:
    if rows.size == 0:
        return np.zeros(0, dtype=bool)
    return _kernels.crossed(rows[:, 2], rows[:, 3], z, period)


def _to_edges(lay: CycleLayout, rows: np.ndarray, fired: np.ndarray) -> np.ndarray:
    """Source edge mask from fired segment rows."""
    mask = np.zeros(lay.g.m, dtype=bool)
    for k, direc in rows[fired][:, :2].astype(np.int64):
        j = lay.seg_edge[k]
        mask[lay.cw_edge[j] if direc == 0 else lay.ccw_edge[j]] = True
    return mask


def cycle_removals(lay: CycleLayout, z1: float, z3: float, cond: _Conditions | None = None) -> np.ndarray:
    cond = cond or _conditions(lay)
    step = lay.delta / 10.0
    m1 = _to_edges(lay, cond.phase1, _fire(cond.phase1, z1, step))
    m2 = _to_edges(lay, cond.phase2, _fire(cond.phase2, z3, np.inf))
    return m1 | m2


def _relation(lay: CycleLayout, removed: np.ndarray) -> np.ndarray:
    g = lay.g
    return _kernels.closure(g.n, g.tails, g.heads, ~removed)


def sample_cycle(g: WeightedDigraph, rng: np.random.Generator,
                 lay: CycleLayout | None = None, cond: _Conditions | None = None,
                 return_removed: bool = False):
    lay = lay or cycle_layout(g)
    cond = cond or _conditions(lay)
    step = lay.delta / 10.0
    z1 = rng.uniform(0.0, step)
    rng.uniform(0.0, step)  # second offset is drawn but never used
    z3 = rng.uniform(0.0, lay.delta)
    removed = cycle_removals(lay, z1, z3, cond)
    q = Quasipartition(_relation(lay, removed), check=False)
    return (q, removed) if return_removed else q


def _cells(values: np.ndarray, length: float):
    b = np.unique(values[(values > TOL) & (values < length - TOL)])
    if b.size:
        keep = np.ones(len(b), dtype=bool)
        keep[1:] = np.diff(b) > TOL
        b = b[keep]
    edges = np.concatenate([[0.0], b, [length]])
    mids = 0.5 * (edges[:-1] + edges[1:])
    mass = np.diff(edges) / length
    ok = mass > 0
    return mids[ok], mass[ok]


@dataclass(frozen=True, eq=False)
class CycleLaw:
    """Exact support: removed source-edge masks, probabilities and relations."""

    lay: CycleLayout
    removed: np.ndarray
    probs: np.ndarray
    relations: tuple

    def distribution(self) -> QuasipartitionDistribution:
        return QuasipartitionDistribution(
            list(zip((Quasipartition(r, check=False) for r in self.relations), self.probs)))

    def separation(self) -> np.ndarray:
        out = np.zeros((self.lay.n, self.lay.n))
        for rel, p in zip(self.relations, self.probs):
            out += p * (~rel)
        return out


def cycle_law(g: WeightedDigraph, start: int = 0) -> CycleLaw:
    """Enumerate the sampler's law over the (z1, z3) breakpoint grid."""
    lay = cycle_layout(g, start)
    cond = _conditions(lay)
    step = lay.delta / 10.0
    v1 = np.mod(cond.phase1[:, 2:].ravel(), step)
    z1s, w1 = _cells(v1, step)
    v3 = cond.phase2[:, 2:].ravel() if cond.phase2.size else np.zeros(0)
    z3s, w3 = _cells(v3, lay.delta)
    masks1 = np.array([_to_edges(lay, cond.phase1, _fire(cond.phase1, z, step)) for z in z1s])
    masks3 = np.array([_to_edges(lay, cond.phase2, _fire(cond.phase2, z, np.inf)) for z in z3s])
    combo = (masks1[:, None, :] | masks3[None, :, :]).reshape(-1, lay.g.m)
    mass = (w1[:, None] * w3[None, :]).ravel()
    uniq, inv = np.unique(combo, axis=0, return_inverse=True)
    probs = np.bincount(inv.ravel(), weights=mass, minlength=len(uniq))
    rels = tuple(_relation(lay, u) for u in uniq)
    for r in rels:
        r.setflags(write=False)
    return CycleLaw(lay, uniq, probs / probs.sum(), rels)
