"""Random quasipartition samplers and their exact laws."""

from .base import (LipschitzReport, QuasipartitionDistribution, SamplerConfig,
                   estimate_lipschitz, rng_for, separation_counts, wilson_interval)
from .cycle import CycleLaw, CycleLayout, cycle_law, cycle_layout, sample_cycle, structure_violations
from .pathwidth import (PathwidthPlan, calibrate_alpha, enumerate_pathwidth_support,
                        path_bound_violations, pathwidth_distribution, prepare_pathwidth,
                        removals_for_offset, sample_pathwidth, scale_for, sweep_breakpoints)
from .tree import check_tree, sample_tree, tree_distribution, tree_law
from .tw2 import Tw2Plan, prepare_tw2, sample_tw2, tw2_batch, tw2_distribution, tw2_removals

__all__ = [
    "CycleLaw", "CycleLayout", "LipschitzReport", "PathwidthPlan", "QuasipartitionDistribution",
    "SamplerConfig", "Tw2Plan", "calibrate_alpha", "check_tree", "cycle_law", "cycle_layout",
    "enumerate_pathwidth_support", "estimate_lipschitz", "path_bound_violations",
    "pathwidth_distribution", "prepare_pathwidth", "prepare_tw2", "removals_for_offset",
    "rng_for", "sample_cycle", "sample_pathwidth", "sample_tree", "sample_tw2", "scale_for",
    "separation_counts", "structure_violations", "sweep_breakpoints", "tree_distribution",
    "tree_law", "tw2_batch", "tw2_distribution", "tw2_removals", "wilson_interval",
]
