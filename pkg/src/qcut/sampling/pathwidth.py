"""Random quasipartitions of paths of cliques, exact enumeration and scale calibration.

The sweep schedule (sources, surviving subgraphs, distance vectors) does not
depend on the random offset z, so it is computed once per instance. A sample
then only evaluates threshold crossings and a closure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..core import TOL, Quasipartition
from ..decompositions import PathOfCliques, canonical_path
from .base import QuasipartitionDistribution, SamplerConfig, rng_for


@dataclass(frozen=True, eq=False)
class Sweep:
    source: int
    target: int
    path: tuple[int, ...]
    alive: np.ndarray
    dist: np.ndarray


@dataclass(frozen=True, eq=False)
class PathwidthPlan:
    pc: PathOfCliques
    r: float
    forward: tuple
    backward: tuple
    skipped: int
    long_edges: np.ndarray

    @property
    def sweeps(self):
        return [s for s in self.forward + self.backward if s is not None]

    def coverage_gaps(self) -> list[int]:
        """Horizontal host edges lying on no sweep path."""
        on = set()
        for s in self.sweeps:
            on.update(s.path)
        return [int(e) for e in np.flatnonzero(self.pc.horizontal) if int(e) not in on]


def _run_sweeps(pc: PathOfCliques, start_clique, end_clique, iterations):
    g = pc.host
    alive = np.ones(g.m, dtype=bool)
    out = []
    skipped = 0
    ends = np.asarray(end_clique)
    for _ in range(iterations):
        sub = g.subgraph(alive)
        reach = sub.reachability
        src = next((s for s in sorted(start_clique) if reach[s, ends].any()), None)
        if src is None:
            out.append(None)
            skipped += 1
            continue
        tgt = int(min(t for t in ends if reach[src, t]))
        dist = sub.distances
        ids = np.flatnonzero(alive)
        path_sub = canonical_path(sub, src, tgt, dist)
        path = tuple(int(ids[e]) for e in path_sub)
        out.append(Sweep(src, tgt, path, alive.copy(), dist[src].copy()))
        for e in path:
            if pc.horizontal[e]:
                alive[e] = False
    return tuple(out), skipped


def prepare_pathwidth(pc: PathOfCliques, r: float, iterations: int | None = None) -> PathwidthPlan:
    if not r > 0:
        raise ValueError("r must be positive")
    k = pc.k
    its = k * k if iterations is None else int(iterations)
    fwd, s1 = _run_sweeps(pc, pc.cliques[0], pc.cliques[-1], its)
    bwd, s2 = _run_sweeps(pc, pc.cliques[-1], pc.cliques[0], its)
    g = pc.host
    d = g.distances
    long_edges = d[g.tails, g.heads] >= r - TOL * max(1.0, r)
    return PathwidthPlan(pc, float(r), fwd, bwd, s1 + s2, long_edges)


def removals_for_offset(plan: PathwidthPlan, z: float) -> np.ndarray:
    g = plan.pc.host
    t, hd = g.tails, g.heads
    removed = plan.long_edges.copy()
    for s in plan.sweeps:
        removed |= s.alive & _kernels.crossed(s.dist[t], s.dist[hd], z, plan.r)
    return removed


def _relation(plan: PathwidthPlan, removed: np.ndarray, host: bool) -> np.ndarray:
    g = plan.pc.host
    rel = _kernels.closure(g.n, g.tails, g.heads, ~removed)
    if not host:
        f = plan.pc.embed
        rel = rel[np.ix_(f, f)]
    return rel


def sample_pathwidth(pc: PathOfCliques, r: float, rng: np.random.Generator,
                     host: bool = False, plan: PathwidthPlan | None = None) -> Quasipartition:
    plan = plan or prepare_pathwidth(pc, r)
    z = rng.uniform(0.0, plan.r)
    return Quasipartition(_relation(plan, removals_for_offset(plan, z), host), check=False)


def pathwidth_distribution(pc: PathOfCliques, config: SamplerConfig,
                           host: bool = False) -> QuasipartitionDistribution:
    plan = prepare_pathwidth(pc, config.r)
    n = pc.host.n if host else pc.source.n
    return QuasipartitionDistribution(
        sampler=lambda rng: sample_pathwidth(pc, config.r, rng, host, plan), config=config, n=n)


def sweep_breakpoints(plan: PathwidthPlan) -> tuple[np.ndarray, list[int]]:
    """Offsets in (0, r) where some threshold meets a sweep distance.

    Returns the merged sorted breakpoints and the count contributed by each
    of the two sweep directions.
    """
    r = plan.r
    per_dir = []
    allb = []
    for group in (plan.forward, plan.backward):
        vals = []
        for s in group:
            if s is None:
                continue
            d = s.dist[np.isfinite(s.dist)]
            vals.append(np.mod(d, r))
        b = np.unique(np.concatenate(vals)) if vals else np.zeros(0)
        b = b[(b > TOL) & (b < r - TOL)]
        per_dir.append(len(_dedupe(b)))
        allb.append(b)
    merged = _dedupe(np.unique(np.concatenate(allb))) if allb else np.zeros(0)
    return merged, per_dir


def _dedupe(b: np.ndarray) -> np.ndarray:
    if b.size == 0:
        return b
    keep = np.ones(len(b), dtype=bool)
    keep[1:] = np.diff(b) > TOL
    return b[keep]


def enumerate_pathwidth_support(pc: PathOfCliques, r: float, host: bool = False,
                                plan: PathwidthPlan | None = None) -> QuasipartitionDistribution:
    """Exact law of the sampler: one representative offset per breakpoint cell."""
    plan = plan or prepare_pathwidth(pc, r)
    b, _ = sweep_breakpoints(plan)
    edges = np.concatenate([[0.0], b, [plan.r]])
    members = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0:
            continue
        mid = 0.5 * (lo + hi)
        rel = _relation(plan, removals_for_offset(plan, mid), host)
        members.append((Quasipartition(rel, check=False), (hi - lo) / plan.r))
    return QuasipartitionDistribution(members)


def path_bound_violations(plan: PathwidthPlan, removed: np.ndarray, limit: int = 50) -> list:
    """Pairs (u, v) ordered along a forward sweep path p_i that reach each other
    without horizontal edges of p_1 .. p_{i-1} yet lie more than r apart."""
    g = plan.pc.host
    d = g.distances
    kept = ~removed
    bad = []
    earlier = np.zeros(g.m, dtype=bool)
    for s in plan.forward:
        if s is None:
            continue
        allowed = kept & ~earlier
        reach = _kernels.closure(g.n, g.tails, g.heads, allowed)
        verts = [s.source] + [int(g.heads[e]) for e in s.path]
        for a in range(len(verts)):
            for c in range(a + 1, len(verts)):
                u, v = verts[a], verts[c]
                if reach[u, v] and d[u, v] > plan.r + TOL:
                    bad.append((u, v))
                    if len(bad) >= limit:
                        return bad
        for e in s.path:
            if plan.pc.horizontal[e]:
                earlier[e] = True
    return bad


def scale_for(delta: float, k: int, alpha: float) -> float:
    """r = delta / 2**(alpha * k^2)."""
    return float(delta) / 2.0 ** (alpha * k * k)


def calibrate_alpha(instances, samples: int = 100, seed: int = 0, max_alpha: int = 8,
                    delta_fraction: float = 0.25) -> int:
    """Smallest integer alpha making every sample delta-bounded on every instance.

    ``instances`` is an iterable of PathOfCliques; delta is ``delta_fraction``
    times each host's largest finite distance.
    """
    insts = list(instances)
    for alpha in range(0, max_alpha + 1):
        ok = True
        for idx, pc in enumerate(insts):
            d = pc.host.distances
            delta = delta_fraction * float(d[np.isfinite(d)].max())
            if delta <= 0:
                continue
            r = scale_for(delta, pc.k, alpha)
            plan = prepare_pathwidth(pc, r)
            for i in range(samples):
                rng = rng_for(seed + idx, i)
                z = rng.uniform(0.0, r)
                rel = _relation(plan, removals_for_offset(plan, z), True)
                if np.any(d[rel] > delta + TOL * max(1.0, delta)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return alpha
    raise RuntimeError("no alpha up to the limit bounds every sample")
