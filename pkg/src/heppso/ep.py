"""Self-adaptive evolutionary programming.

Each parent carries a strategy vector eta. A generation updates eta with a
lognormal step, perturbs the solution with eta-scaled Gaussian or Cauchy
noise, and keeps mu of the 2*mu parents+offspring by q-opponent tournament.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from heppso.core import (
    EvaluationCounter,
    Individual,
    Objective,
    RngStream,
    best_individual,
    evaluate,
    init_population,
)


class Mutation(str, enum.Enum):
    GAUSSIAN = "gaussian"
    CAUCHY = "cauchy"


@dataclass(frozen=True)
class EpConfig:
    mu: int = 50
    q: int = 15
    mutation: Mutation = Mutation.GAUSSIAN
    tau: float | None = None
    tau_prime: float | None = None
    eta_init_frac: float = 0.1
    eta_floor_frac: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "mutation", Mutation(self.mutation))
        if self.mu < 1:
            raise ValueError("mu must be at least 1")
        if not 1 <= self.q <= 2 * self.mu - 1:
            raise ValueError(f"q must lie in [1, {2 * self.mu - 1}] for mu={self.mu}")
        for name in ("tau", "tau_prime"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")

    def taus(self, n: int) -> tuple[float, float]:
        tau, tau_prime = compute_taus(n)
        return (tau if self.tau is None else self.tau,
                tau_prime if self.tau_prime is None else self.tau_prime)


def compute_taus(n: int) -> tuple[float, float]:
    """Learning rates (tau, tau') = (1/sqrt(2 sqrt n), 1/sqrt(2n))."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    return 1.0 / math.sqrt(2.0 * math.sqrt(n)), 1.0 / math.sqrt(2.0 * n)


def self_adapt_eta(strategy, rng: RngStream, tau: float, tau_prime: float, floor=0.0):
    """Lognormal strategy update.

    One N(0,1) draw is shared by all components (scaled by tau'); each
    component gets its own N(0,1) draw (scaled by tau). The result is
    clipped from below at ``floor``.
    """
    strategy = np.asarray(strategy, dtype=float)
    shared = rng.normal()
    own = rng.normal(strategy.shape)
    return np.maximum(strategy * np.exp(tau_prime * shared + tau * own), floor)


def _mutate(ind: Individual, rng: RngStream, cfg: EpConfig, floor, deviate) -> Individual:
    tau, tau_prime = cfg.taus(ind.solution.size)
    eta = self_adapt_eta(ind.strategy, rng, tau, tau_prime, floor)
    x = ind.solution + eta * deviate(ind.solution.shape)
    return replace(ind, solution=x, strategy=eta, fitness=None)


def gaussian_mutate(ind: Individual, rng: RngStream, cfg: EpConfig, floor=0.0) -> Individual:
    """Offspring with updated eta' and x' = x + eta' * N_j(0,1).

    The personal-best record is inherited unchanged; fitness is cleared.
    """
    return _mutate(ind, rng, cfg, floor, rng.normal)


def cauchy_mutate(ind: Individual, rng: RngStream, cfg: EpConfig, floor=0.0) -> Individual:
    """As :func:`gaussian_mutate` with standard Cauchy deviates."""
    return _mutate(ind, rng, cfg, floor, rng.cauchy)


def mutate(ind: Individual, rng: RngStream, cfg: EpConfig, floor=0.0) -> Individual:
    if cfg.mutation is Mutation.CAUCHY:
        return cauchy_mutate(ind, rng, cfg, floor)
    return gaussian_mutate(ind, rng, cfg, floor)


def tournament_wins(fitness, opponents) -> np.ndarray:
    """Win counts for each pool member against its opponent indices.

    ``opponents`` has one row per pool member; a win is fitness <= opponent's.
    """
    f = np.asarray(fitness, dtype=float)
    opp = np.asarray(opponents)
    return (f[:, None] <= f[opp]).sum(axis=1)


def tournament_order(fitness, wins) -> np.ndarray:
    """Pool indices sorted by most wins, then lower fitness, then index."""
    f = np.asarray(fitness, dtype=float)
    idx = np.arange(f.size)
    return np.lexsort((idx, f, -np.asarray(wins)))


def tournament_select(pool: list[Individual], q: int, mu: int, rng: RngStream) -> list[Individual]:
    """Keep ``mu`` members of ``pool`` by q-opponent tournament.

    Opponents are drawn uniformly with replacement from the whole pool
    (self included).
    """
    if any(not ind.evaluated for ind in pool):
        raise ValueError("tournament pool contains unevaluated members")
    if mu > len(pool):
        raise ValueError("cannot select more survivors than pool members")
    fitness = np.array([ind.fitness for ind in pool], dtype=float)
    opponents = rng.integers(len(pool), (len(pool), q))
    order = tournament_order(fitness, tournament_wins(fitness, opponents))
    return [pool[i] for i in order[:mu]]


def eta_floor(objective: Objective, cfg) -> np.ndarray:
    return cfg.eta_floor_frac * objective.bounds.width


def initialize(objective: Objective, cfg: EpConfig, rng: RngStream,
               counter: EvaluationCounter) -> list[Individual]:
    return init_population(cfg.mu, objective, rng, counter, cfg.eta_init_frac)


def ep_generation(pop: list[Individual], objective: Objective, cfg: EpConfig,
                  rng: RngStream, counter: EvaluationCounter) -> list[Individual]:
    """One EP generation: mu offspring, then tournament over the 2*mu pool."""
    floor = eta_floor(objective, cfg)
    # all mutation draws happen before any evaluation
    offspring = [mutate(p, rng, cfg, floor) for p in pop]
    offspring = [evaluate(o, objective, counter) for o in offspring]
    return tournament_select(pop + offspring, cfg.q, cfg.mu, rng)


def best(pop: list[Individual]) -> tuple[np.ndarray, float]:
    b = best_individual(pop)
    return b.solution, b.fitness
