"""Hybrid EP-PSO: each EP generation is preceded by a swarm-direction move.

Every parent is first pulled toward the population's best member and toward
its own personal best,

    v(j) = c1 R1(j) (group_best(j) - x(j)) + c2 R2(j) (pbest(j) - x(j))
    x(j) <- x(j) + v(j)

and the moved parent then spawns one offspring with the usual self-adaptive
EP mutation. There is no inertia and no velocity memory between generations.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from heppso import ep
from heppso.core import (
    Bounds,
    EvaluationCounter,
    Individual,
    Objective,
    RngStream,
    best_individual,
    evaluate,
    init_population,
)
from heppso.ep import Mutation
from heppso.pso import Wall, apply_wall


@dataclass(frozen=True)
class HybridConfig:
    mu: int = 50
    q: int = 15
    mutation: Mutation = Mutation.GAUSSIAN
    c1: float = 2.0
    c2: float = 2.0
    wall: Wall | None = Wall.ABSORBING
    reevaluate_nudged: bool = True
    tau: float | None = None
    tau_prime: float | None = None
    eta_init_frac: float = 0.1
    eta_floor_frac: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "mutation", Mutation(self.mutation))
        if self.wall is not None:
            object.__setattr__(self, "wall", Wall(self.wall))
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("c1 and c2 must be non-negative")
        self.ep_config()  # validates mu, q, tau

    def ep_config(self) -> ep.EpConfig:
        return ep.EpConfig(mu=self.mu, q=self.q, mutation=self.mutation, tau=self.tau,
                           tau_prime=self.tau_prime, eta_init_frac=self.eta_init_frac,
                           eta_floor_frac=self.eta_floor_frac)


def _walled(x, bounds: Bounds | None, wall: Wall | None):
    if wall is None or bounds is None:
        return x, True
    x, _, inside = apply_wall(x, np.zeros_like(x), bounds, wall)
    return x, inside


def swarm_nudge(ind: Individual, group_best, cfg: HybridConfig, rng: RngStream,
                bounds: Bounds | None = None) -> tuple[Individual, bool]:
    """Move ``ind`` along the swarm directions; returns (individual, in_bounds).

    Fresh R(0,1) per component for each term. Strategy and personal-best
    record are untouched; fitness is kept (stale) for the caller to refresh.
    """
    x = ind.solution
    r1 = rng.uniform(x.shape)
    r2 = rng.uniform(x.shape)
    v = cfg.c1 * r1 * (np.asarray(group_best) - x) + cfg.c2 * r2 * (ind.pbest_solution - x)
    x, inside = _walled(x + v, bounds, cfg.wall)
    return replace(ind, solution=x), inside


def _score(ind: Individual, inside: bool, objective: Objective,
           counter: EvaluationCounter) -> Individual:
    if inside:
        return evaluate(ind, objective, counter)
    # invisible wall: outside points are never evaluated and lose every comparison
    return replace(ind, fitness=np.inf)


def initialize(objective: Objective, cfg: HybridConfig, rng: RngStream,
               counter: EvaluationCounter) -> list[Individual]:
    return init_population(cfg.mu, objective, rng, counter, cfg.eta_init_frac)


def hybrid_generation(pop: list[Individual], objective: Objective, cfg: HybridConfig,
                      rng: RngStream, counter: EvaluationCounter) -> list[Individual]:
    """Nudge, optionally re-score, mutate, then tournament over 2*mu."""
    b = objective.bounds
    ecfg = cfg.ep_config()
    floor = ep.eta_floor(objective, ecfg)
    group_best = best_individual(pop).solution

    nudged = [swarm_nudge(p, group_best, cfg, rng, b) for p in pop]
    kids = []
    for p, _ in nudged:
        child = ep.mutate(p, rng, ecfg, floor)
        kids.append(_walled(child.solution, b, cfg.wall) + (child,))

    if cfg.reevaluate_nudged:
        parents = [_score(p, inside, objective, counter) for p, inside in nudged]
    else:
        parents = [p for p, _ in nudged]
    # offspring inherit the (possibly refreshed) personal best of their parent
    offspring = []
    for parent, (x, inside, child) in zip(parents, kids):
        child = replace(child, solution=x, pbest_solution=parent.pbest_solution,
                        pbest_fitness=parent.pbest_fitness)
        offspring.append(_score(child, inside, objective, counter))
    return ep.tournament_select(parents + offspring, cfg.q, cfg.mu, rng)


best = ep.best
