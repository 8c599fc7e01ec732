"""Single-edge removal on directed trees."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..core import Quasipartition, WeightedDigraph
from .base import QuasipartitionDistribution


def check_tree(g: WeightedDigraph) -> None:
    """Raise unless the underlying undirected graph is a tree without parallel arcs."""
    pairs = {(int(a), int(b)) for a, b in zip(g.tails, g.heads)}
    if len(pairs) != g.m:
        raise ValueError("parallel edges are not allowed in a tree")
    if any(a == b for a, b in pairs):
        raise ValueError("self-loops are not allowed in a tree")
    und = {(min(a, b), max(a, b)) for a, b in pairs}
    if len(und) != g.n - 1 or not g.is_weakly_connected():
        raise ValueError("underlying undirected graph is not a tree")


def _removed_relation(g: WeightedDigraph, e: int) -> np.ndarray:
    keep = np.ones(g.m, dtype=bool)
    keep[e] = False
    return _kernels.closure(g.n, g.tails, g.heads, keep)


def sample_tree(g: WeightedDigraph, rng: np.random.Generator) -> Quasipartition:
    w = np.asarray(g.weights, dtype=float)
    total = w.sum()
    if not total > 0:
        raise ValueError("total weight must be positive")
    e = int(np.searchsorted(np.cumsum(w), rng.random() * total, side="right"))
    return Quasipartition(_removed_relation(g, min(e, g.m - 1)), check=False)


def tree_law(g: WeightedDigraph) -> list[tuple[int, Quasipartition, float]]:
    """(edge, quasipartition, probability) for every edge of positive weight."""
    check_tree(g)
    w = np.asarray(g.weights, dtype=float)
    total = w.sum()
    if not total > 0:
        raise ValueError("total weight must be positive")
    return [(e, Quasipartition(_removed_relation(g, e), check=False), float(w[e] / total))
            for e in range(g.m) if w[e] > 0]


def tree_distribution(g: WeightedDigraph) -> QuasipartitionDistribution:
    return QuasipartitionDistribution([(q, p) for _, q, p in tree_law(g)])
