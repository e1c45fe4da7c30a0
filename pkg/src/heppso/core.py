"""Shared types for every optimizer: bounds, individuals, objectives, RNG and
evaluation accounting.

Randomness
----------
All stochastic code draws from an :class:`RngStream`, a thin wrapper around
numpy's ``PCG64`` bit generator. Uniforms come from ``Generator.random``
(53-bit doubles on ``[0, 1)``), normals from numpy's ziggurat transform of the
same bit stream, and Cauchy deviates from the inverse CDF
``tan(pi * (R - 0.5))``. Per-trial streams are derived from an experiment
master seed with :func:`derive_seed`.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np


class RngStream:
    """Seeded random source used by all operators.

    Two streams built from the same seed yield identical sequences.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, size=None):
        """R(0,1) samples on [0, 1)."""
        return self._gen.random(size)

    def normal(self, size=None):
        """N(0,1) samples."""
        return self._gen.standard_normal(size)

    def cauchy(self, size=None):
        """Standard Cauchy samples (location 0, scale 1) by inversion."""
        return np.tan(np.pi * (self._gen.random(size) - 0.5))

    def integers(self, high: int, size=None):
        """Uniform integers on ``[0, high)``."""
        return self._gen.integers(0, high, size)

    def bits(self, size):
        return self._gen.integers(0, 2, size, dtype=np.uint8)


def derive_seed(master_seed: int, trial: int) -> int:
    """Sub-seed for trial ``trial`` of an experiment.

    The pair ``(master_seed, trial)`` is hashed through numpy's
    ``SeedSequence`` entropy mixer and the first 64-bit word of its output is
    returned, so any trial can be re-run in isolation from its recorded seed.
    """
    if master_seed < 0 or trial < 0:
        raise ValueError("seeds and trial indices must be non-negative")
    ss = np.random.SeedSequence([int(master_seed), int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).copy()
        upper = np.asarray(self.upper, dtype=float).copy()
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be 1-d arrays of equal length")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, low: float, high: float, n: int) -> "Bounds":
        return cls(np.full(n, float(low)), np.full(n, float(high)))

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(frozen=True)
class Objective:
    """A deterministic fitness function to be minimized over a box.

    ``fn`` must be total on the box: constraint violations are folded into
    the returned value rather than raised.
    """

    fn: Callable[[np.ndarray], float]
    bounds: Bounds
    name: str = "objective"

    @property
    def dimension(self) -> int:
        return self.bounds.dimension

    def __call__(self, x) -> float:
        return float(self.fn(np.asarray(x, dtype=float)))


class EvaluationCounter:
    """Counts objective calls since the start of a trial."""

    def __init__(self):
        self.count = 0

    def evaluate(self, objective: Objective, x) -> float:
        self.count += 1
        return objective(x)


@dataclass(frozen=True)
class Individual:
    """One EP parent or offspring.

    ``pbest_solution``/``pbest_fitness`` hold the best position the lineage
    has occupied; only :func:`evaluate` changes them.
    """

    solution: np.ndarray
    strategy: np.ndarray
    fitness: float | None = None
    pbest_solution: np.ndarray | None = None
    pbest_fitness: float | None = None

    def __post_init__(self):
        if self.solution.shape != self.strategy.shape:
            raise ValueError("solution and strategy must have equal length")

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


def evaluate(ind: Individual, objective: Objective, counter: EvaluationCounter) -> Individual:
    f = counter.evaluate(objective, ind.solution)
    if ind.pbest_fitness is None or f < ind.pbest_fitness:
        return replace(ind, fitness=f, pbest_solution=ind.solution.copy(), pbest_fitness=f)
    return replace(ind, fitness=f)


def init_population(mu: int, objective: Objective, rng: RngStream,
                    counter: EvaluationCounter, eta_init_frac: float = 0.1) -> list[Individual]:
    """Uniform random parents in the box, each with eta = width * eta_init_frac."""
    if mu < 1:
        raise ValueError("population size must be at least 1")
    b = objective.bounds
    xs = b.lower + rng.uniform((mu, b.dimension)) * b.width
    eta = b.width * eta_init_frac
    pop = [Individual(x, eta.copy()) for x in xs]
    return [evaluate(ind, objective, counter) for ind in pop]


def best_individual(pop: list[Individual]) -> Individual:
    """Member with the lowest fitness (first one on ties)."""
    return min(pop, key=lambda ind: ind.fitness)


@dataclass(frozen=True)
class TrajectoryPoint:
    """Best fitness seen after ``evaluations`` objective calls."""

    evaluations: int
    best_fitness: float
