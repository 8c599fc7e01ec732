"""Lipschitz distributions on LP metrics, used by the rounding experiments."""

from __future__ import annotations

import numpy as np

from ..core import TOL, Quasipartition, WeightedDigraph
from ..decompositions import (PathDecomposition, TreeDecomposition, build_complementary,
                              canonicalize, embed_hexagon_tree, embed_path_of_cliques)
from ..sampling.base import QuasipartitionDistribution, rng_for
from ..sampling.pathwidth import enumerate_pathwidth_support, scale_for
from ..sampling.tw2 import prepare_tw2, sample_tw2

# 6r-bounded on the canonical host, and canonical distances are at least half
# the source distances, so r = bound / 12 is bound-bounded on the source.
TW2_SCALE = 12.0


def _bounded(q: Quasipartition, d: np.ndarray, bound: float) -> bool:
    rel = q.rel & ~np.eye(q.n, dtype=bool)
    return not rel.any() or d[rel].max() <= bound + TOL


def tw2_samples(g: WeightedDigraph, weights, bound: float, td: TreeDecomposition | None = None,
                samples: int = 200, seed: int = 0) -> list[Quasipartition]:
    gw = g.with_weights(weights)
    h, _ = canonicalize(embed_hexagon_tree(gw, td))
    cs = build_complementary(h)
    r = bound / TW2_SCALE
    plan = prepare_tw2(h, cs, r)
    return [sample_tw2(h, cs, r, rng_for(seed, i), plan=plan) for i in range(samples)]


def pathwidth_support(g: WeightedDigraph, weights, bound: float, pd: PathDecomposition,
                      max_alpha: int = 12) -> tuple[QuasipartitionDistribution, int]:
    """Enumerated law at r = bound / 2^(alpha k^2) for the smallest alpha
    whose every support member is bound-bounded on the source metric."""
    gw = g.with_weights(weights)
    pc = embed_path_of_cliques(gw, pd)
    d = gw.distances
    for alpha in range(max_alpha + 1):
        r = scale_for(bound, pc.k, alpha)
        dist = enumerate_pathwidth_support(pc, r)
        if all(_bounded(q, d, bound) for q, _ in dist.members):
            return dist, alpha
    raise RuntimeError("no alpha bounds the enumerated support")
