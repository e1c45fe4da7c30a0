"""Hybrid evolutionary programming / particle swarm optimization for antenna design."""

from heppso.core import (
    Bounds,
    EvaluationCounter,
    Individual,
    Objective,
    RngStream,
    derive_seed,
    evaluate,
    init_population,
)
from heppso.ep import EpConfig, Mutation, ep_generation
from heppso.ga import GaConfig, MicroGaConfig, ga_generation, micro_ga_generation
from heppso.hybrid import HybridConfig, hybrid_generation
from heppso.pso import PsoConfig, Wall, pso_step

__all__ = [
    "Bounds",
    "EpConfig",
    "EvaluationCounter",
    "GaConfig",
    "HybridConfig",
    "Individual",
    "MicroGaConfig",
    "Mutation",
    "Objective",
    "PsoConfig",
    "RngStream",
    "Wall",
    "derive_seed",
    "ep_generation",
    "evaluate",
    "ga_generation",
    "hybrid_generation",
    "init_population",
    "micro_ga_generation",
    "pso_step",
]

__version__ = "0.1.0"
