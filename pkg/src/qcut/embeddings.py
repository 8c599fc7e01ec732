"""Convex combinations of 0-1 quasimetrics and directed cuts, and their l1 images."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .core import (TOL, DirectedCutMetric, DirectedL1Embedding, QuasimetricSpace, WeightedDigraph,
                   ZeroOneQuasimetric, stretch_report)
from .sampling.base import QuasipartitionDistribution
from .sampling.cycle import CycleLaw
from .sampling.tree import check_tree

MAX_CYCLE_REMOVED = 28


class ConvexCombination:
    """Weighted members (0-1 quasimetrics or directed cuts) with weights summing to one."""

    def __init__(self, members: Sequence[tuple[ZeroOneQuasimetric | DirectedCutMetric, float]],
                 n: int | None = None, info: dict | None = None):
        self.members = tuple((m, float(w)) for m, w in members)
        if any(w < -TOL for _, w in self.members):
            raise ValueError("negative weight")
        if self.members:
            total = sum(w for _, w in self.members)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"weights sum to {total}, not 1")
            sizes = {m.n for m, _ in self.members}
            if len(sizes) != 1:
                raise ValueError("members differ in size")
            self.n = sizes.pop()
        else:
            self.n = int(n or 0)
        self.info = info or {}

    def __len__(self):
        return len(self.members)

    @property
    def all_cuts(self) -> bool:
        return all(isinstance(m, DirectedCutMetric) for m, _ in self.members)

    def table(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for m, w in self.members:
            out += w * m.table
        return out


def combination_from_distribution(dist: QuasipartitionDistribution) -> ConvexCombination:
    """d_phi(u, v) = Pr[(u, v) not in Q]."""
    if not dist.is_explicit:
        raise ValueError("enumerate the distribution before converting it")
    return ConvexCombination([(ZeroOneQuasimetric((~q.rel).astype(np.int8)), p)
                              for q, p in dist.members], n=dist.n)


# --------------------------------------------------------------------------
# cycles
# --------------------------------------------------------------------------


class CutPair(NamedTuple):
    cw_edge: int
    ccw_edge: int
    side: np.ndarray


def cycle_cut_pairs(law: CycleLaw, removed: np.ndarray) -> list[CutPair]:
    """One directed cut per (clockwise, counter-clockwise) removed edge pair.

    Sibling pairs (the two directions of one cycle edge) are skipped. With
    clockwise edge a -> a+1 and counter-clockwise edge b+1 -> b removed, the
    clockwise arc b+1 .. a can no longer reach the rest of the cycle, so it
    is the cut side.
    """
    lay = law.lay
    n = lay.n
    cw_pos = {int(e): j for j, e in enumerate(lay.cw_edge)}
    ccw_pos = {int(e): j for j, e in enumerate(lay.ccw_edge)}
    cws = [e for e in np.flatnonzero(removed) if int(e) in cw_pos]
    ccws = [e for e in np.flatnonzero(removed) if int(e) in ccw_pos]
    out = []
    for e1 in cws:
        a = cw_pos[int(e1)]
        for e2 in ccws:
            b = ccw_pos[int(e2)]
            if a == b:
                continue
            side = np.zeros(n, dtype=bool)
            j = (b + 1) % n
            while True:
                side[lay.order[j]] = True
                if j == a:
                    break
                j = (j + 1) % n
            out.append(CutPair(int(e1), int(e2), side))
    return out


def cycle_cut_distribution(g: WeightedDigraph, law: CycleLaw,
                           max_removed: int | None = MAX_CYCLE_REMOVED) -> ConvexCombination:
    """Replace each support member by the uniform mixture over its cut pairs.

    Members whose removed set has no valid pair separate nothing and become
    the empty cut. ``max_removed`` raises when a member removes more edges;
    pass None to measure instead. ``info`` records per-member pair counts.
    """
    if law.lay.g.n != g.n:
        raise ValueError("law was computed for a different graph")
    members = []
    sizes, removed_counts = [], []
    for mask, p in zip(law.removed, law.probs):
        k = int(mask.sum())
        removed_counts.append(k)
        if max_removed is not None and k > max_removed:
            raise ValueError(f"support member removes {k} edges, more than {max_removed}")
        pairs = cycle_cut_pairs(law, mask)
        sizes.append(len(pairs))
        if not pairs:
            members.append((DirectedCutMetric(g.n, np.zeros(g.n, dtype=bool)), p))
            continue
        for cp in pairs:
            members.append((DirectedCutMetric(g.n, cp.side), p / len(pairs)))
    return ConvexCombination(members, n=g.n,
                             info={"pair_counts": sizes, "removed_counts": removed_counts})


# --------------------------------------------------------------------------
# trees
# --------------------------------------------------------------------------


def _tail_side(g: WeightedDigraph, e: int) -> np.ndarray:
    """Undirected component of the tail once the edge's undirected pair is gone."""
    a, b = int(g.tails[e]), int(g.heads[e])
    nb = g.undirected_neighbors()
    side = np.zeros(g.n, dtype=bool)
    side[a] = True
    stack = [a]
    while stack:
        u = stack.pop()
        for v in nb[u]:
            if side[v] or {u, v} == {a, b}:
                continue
            side[v] = True
            stack.append(v)
    return side


def tree_cut_distribution(g: WeightedDigraph) -> ConvexCombination:
    """Edge e contributes the cut around its tail's side with weight w(e)/W."""
    check_tree(g)
    w = np.asarray(g.weights, dtype=float)
    total = w.sum()
    if not total > 0:
        raise ValueError("total weight must be positive")
    members = [(DirectedCutMetric(g.n, _tail_side(g, e)), w[e] / total) for e in range(g.m)]
    return ConvexCombination(members, n=g.n, info={"scale": float(total)})


# --------------------------------------------------------------------------
# l1 coordinates and distortion
# --------------------------------------------------------------------------


def cuts_to_l1(c: ConvexCombination, alpha: float = 1.0) -> DirectedL1Embedding:
    """One coordinate per cut: lambda/2 on the cut side, 0 elsewhere."""
    if not c.all_cuts:
        raise ValueError("every member must be a directed cut metric")
    coords = np.zeros((c.n, max(1, len(c))))
    for i, (m, w) in enumerate(c.members):
        coords[m.side, i] = w / 2.0
    return DirectedL1Embedding(coords, alpha)


class ExactDistortion(NamedTuple):
    alpha: float
    distortion: float
    excluded_pairs: list


def exact_distortion(c: ConvexCombination | DirectedL1Embedding,
                     q: QuasimetricSpace | np.ndarray) -> ExactDistortion:
    """alpha = max d / d_phi, distortion = alpha * max d_phi / d.

    Pairs at infinite distance are excluded; a pair with d_phi = 0 and d > 0
    gives infinite distortion.
    """
    d = q.d if isinstance(q, QuasimetricSpace) else np.asarray(q, dtype=float)
    image = c.table()
    if image.shape != d.shape:
        raise ValueError("size mismatch")
    rep = stretch_report(d, image, 1.0)
    if not np.isfinite(rep.distortion) or rep.min_stretch <= 0:
        return ExactDistortion(np.inf, np.inf, rep.excluded_pairs)
    alpha = 1.0 / rep.min_stretch
    return ExactDistortion(alpha, alpha * rep.max_stretch, rep.excluded_pairs)
