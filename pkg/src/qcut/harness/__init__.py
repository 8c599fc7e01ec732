"""Instance generators, verification checks, and experiment orchestration."""

from .experiment import load_config, parse_config, run_experiment
from .generators import FAMILIES, GeneratorSpec, Instance, generate
from .kpr import KprResult, counterexample, kpr_generalized, symmetric_report
from .lowerbound import TreeEmbeddingCandidate, default_candidates, lowerbound_dual_check

__all__ = [
    "FAMILIES", "GeneratorSpec", "Instance", "KprResult", "TreeEmbeddingCandidate", "counterexample",
    "default_candidates", "generate", "kpr_generalized", "load_config", "lowerbound_dual_check",
    "parse_config", "run_experiment", "symmetric_report",
]
