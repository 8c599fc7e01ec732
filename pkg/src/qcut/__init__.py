"""Random quasipartitions of directed graphs, directed l1 embeddings and cut rounding."""

from ._kernels import backend
from .core import (DirectedCutMetric, DirectedL1Embedding, Quasipartition, QuasimetricSpace,
                   WeightedDigraph, ZeroOneQuasimetric, bound_check, directed_cut_from_set,
                   directed_l1_distance, evaluate_embedding, shortest_path_quasimetric,
                   transitive_closure, validate_quasimetric, zero_one_from_quasipartition)

__version__ = "0.1.0"

__all__ = [
    "DirectedCutMetric", "DirectedL1Embedding", "Quasipartition", "QuasimetricSpace",
    "WeightedDigraph", "ZeroOneQuasimetric", "backend", "bound_check", "directed_cut_from_set",
    "directed_l1_distance", "evaluate_embedding", "shortest_path_quasimetric",
    "transitive_closure", "validate_quasimetric", "zero_one_from_quasipartition",
]
