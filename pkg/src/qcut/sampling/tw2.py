"""Random quasipartitions of canonical trees of hexagons."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..core import Quasipartition
from ..decompositions import ComplementaryStructure, HexagonTree, is_canonical
from .base import QuasipartitionDistribution, SamplerConfig, rng_for

STEPS = ("2", "3", "4", "5", "6", "7", "8")


@dataclass(frozen=True, eq=False)
class Tw2Plan:
    """Everything about a run that does not depend on the random draws."""

    h: HexagonTree
    cs: ComplementaryStructure
    r: float
    d_from_x: np.ndarray
    d_to_x: np.ndarray
    edge_dist: np.ndarray
    far: np.ndarray
    children: dict


def prepare_tw2(h: HexagonTree, cs: ComplementaryStructure, r: float) -> Tw2Plan:
    if not (h.canonical or is_canonical(h)):
        raise ValueError("host must be canonical")
    if not r > 0:
        raise ValueError("r must be positive")
    g = h.host
    d = g.distances
    x = cs.x
    edge_dist = d[g.tails, g.heads]
    children = {}
    for e, paths in h.child_paths.items():
        lst = []
        for p in paths:
            edges = np.asarray(p.edges, dtype=np.int64)
            lst.append((edges, np.cumsum(edge_dist[edges])))
        children[e] = lst
    return Tw2Plan(h, cs, float(r), d[x].copy(), d[:, x].copy(), edge_dist,
                   edge_dist > r / 10.0, children)


def _propagate(plan: Tw2Plan, start, removed, rng, mark):
    """Cut one edge of every uncut child path below each start edge."""
    stack = list(start)[::-1]
    while stack:
        e = stack.pop()
        for edges, cum in plan.children.get(e, ()):
            if removed[edges].any():
                continue
            total = cum[-1]
            if total <= 0:
                continue
            j = int(np.searchsorted(cum, rng.random() * total, side="right"))
            f = int(edges[min(j, len(edges) - 1)])
            removed[f] = True
            mark[f] = True
            stack.append(f)


def tw2_removals(plan: Tw2Plan, rng: np.random.Generator, trace: bool = False):
    """Edge removal mask before transitivity; optionally per-step masks."""
    g = plan.h.host
    cs = plan.cs
    t, hd = g.tails, g.heads
    r = plan.r
    z = rng.uniform(0.0, r)
    m = g.m
    s2 = _kernels.crossed(plan.d_from_x[t], plan.d_from_x[hd], z, r)
    s3 = np.zeros(m, dtype=bool)
    for j in range(len(cs.leaves)):
        mask = cs.p_bar_mask[j]
        if mask.any():
            dj = cs.dist_p_bar[j]
            s3 |= mask & _kernels.crossed(dj[t], dj[hd], z, r)
    removed = s2 | s3
    s4 = np.zeros(m, dtype=bool)
    _propagate(plan, np.flatnonzero(s3), removed, rng, s4)
    s5 = _kernels.crossed(plan.d_to_x[hd], plan.d_to_x[t], z, r)
    s6 = np.zeros(m, dtype=bool)
    for j in range(len(cs.leaves)):
        mask = cs.q_bar_mask[j]
        if mask.any():
            dj = cs.dist_q_bar[j]
            s6 |= mask & _kernels.crossed(dj[hd], dj[t], z, r)
    removed |= s5 | s6
    s7 = np.zeros(m, dtype=bool)
    _propagate(plan, np.flatnonzero(s6), removed, rng, s7)
    removed |= plan.far
    if trace:
        return removed, dict(zip(STEPS, (s2, s3, s4, s5, s6, s7, plan.far.copy()))), z
    return removed


def host_relation(plan: Tw2Plan, removed: np.ndarray) -> np.ndarray:
    g = plan.h.host
    return _kernels.closure(g.n, g.tails, g.heads, ~removed)


def sample_tw2(h: HexagonTree, cs: ComplementaryStructure, r: float,
               rng: np.random.Generator, host: bool = False,
               plan: Tw2Plan | None = None) -> Quasipartition:
    """One random quasipartition; on source vertices unless ``host``."""
    plan = plan or prepare_tw2(h, cs, r)
    rel = host_relation(plan, tw2_removals(plan, rng))
    if not host:
        f = h.embed
        rel = rel[np.ix_(f, f)]
    return Quasipartition(rel, check=False)


def tw2_distribution(h: HexagonTree, cs: ComplementaryStructure,
                     config: SamplerConfig, host: bool = False) -> QuasipartitionDistribution:
    plan = prepare_tw2(h, cs, config.r)
    n = h.host.n if host else h.source.n
    return QuasipartitionDistribution(
        sampler=lambda rng: sample_tw2(h, cs, config.r, rng, host, plan), config=config, n=n)


def tw2_batch(plan: Tw2Plan, seed: int, count: int, start: int = 0, trace: bool = False):
    """Host relations for samples ``start .. start+count-1``."""
    out = []
    for i in range(start, start + count):
        rng = rng_for(seed, i)
        res = tw2_removals(plan, rng, trace)
        removed = res[0] if trace else res
        rel = host_relation(plan, removed)
        out.append((rel, res[1]) if trace else rel)
    return out
