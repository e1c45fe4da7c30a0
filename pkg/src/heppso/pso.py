"""Global-best particle swarm optimizer with inertia weight and three
boundary walls (absorbing, reflecting, invisible)."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from heppso.core import Bounds, EvaluationCounter, Objective, RngStream

MAX_REFLECTIONS = 100


class Wall(str, enum.Enum):
    ABSORBING = "absorbing"
    REFLECTING = "reflecting"
    INVISIBLE = "invisible"


class ReflectionError(RuntimeError):
    """Reflection did not bring a coordinate back inside the box."""


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 50
    w: float = 0.7
    c1: float = 1.0
    c2: float = 2.0
    wall: Wall = Wall.ABSORBING
    v_max: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "wall", Wall(self.wall))
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be at least 1")
        if self.w < 0 or self.c1 < 0 or self.c2 < 0:
            raise ValueError("w, c1 and c2 must be non-negative")

    def vmax(self, bounds: Bounds) -> np.ndarray:
        if self.v_max is None:
            return bounds.width
        return np.broadcast_to(np.asarray(self.v_max, dtype=float), bounds.lower.shape).copy()


@dataclass(frozen=True)
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float
    fitness: float | None = None
    in_bounds: bool = True


def velocity_update(p: Particle, gbest, cfg: PsoConfig, rng: RngStream, v_max=None) -> np.ndarray:
    """w*v + c1*R1*(pbest - x) + c2*R2*(gbest - x), clamped to +-v_max."""
    r1 = rng.uniform(p.position.shape)
    r2 = rng.uniform(p.position.shape)
    v = (cfg.w * p.velocity
         + cfg.c1 * r1 * (p.pbest_position - p.position)
         + cfg.c2 * r2 * (np.asarray(gbest) - p.position))
    if v_max is not None:
        v = np.clip(v, -v_max, v_max)
    return v


def apply_wall(position, velocity, bounds: Bounds, wall: Wall):
    """Enforce a boundary wall; returns ``(position, velocity, in_bounds)``.

    absorbing: clamp to the violated bound and zero that velocity component.
    reflecting: mirror across the violated bound until inside, negating the
    velocity component on each bounce.
    invisible: leave both untouched and report whether the point is inside.
    """
    x = np.array(position, dtype=float)
    v = np.array(velocity, dtype=float)
    lo, hi = bounds.lower, bounds.upper
    out = (x < lo) | (x > hi)
    if not out.any():
        return x, v, True
    wall = Wall(wall)
    if wall is Wall.INVISIBLE:
        return x, v, False
    if wall is Wall.ABSORBING:
        x = np.clip(x, lo, hi)
        v[out] = 0.0
        return x, v, True
    for _ in range(MAX_REFLECTIONS):
        below, above = x < lo, x > hi
        if not (below.any() or above.any()):
            return x, v, True
        x = np.where(below, 2.0 * lo - x, x)
        x = np.where(above, 2.0 * hi - x, x)
        v = np.where(below | above, -v, v)
    raise ReflectionError(f"position still outside the box after {MAX_REFLECTIONS} reflections")


def initialize(objective: Objective, cfg: PsoConfig, rng: RngStream,
               counter: EvaluationCounter) -> list[Particle]:
    """Uniform positions in the box, velocities uniform in +-width/2."""
    b = objective.bounds
    n, d = cfg.swarm_size, b.dimension
    xs = b.lower + rng.uniform((n, d)) * b.width
    vs = (rng.uniform((n, d)) - 0.5) * b.width
    swarm = []
    for x, v in zip(xs, vs):
        f = counter.evaluate(objective, x)
        swarm.append(Particle(x, v, x.copy(), f, f, True))
    return swarm


def global_best(swarm: list[Particle]) -> Particle:
    return min(swarm, key=lambda p: p.pbest_fitness)


def pso_step(swarm: list[Particle], objective: Objective, cfg: PsoConfig,
             rng: RngStream, counter: EvaluationCounter) -> list[Particle]:
    """Synchronous swarm update; gbest is frozen for the whole step."""
    b = objective.bounds
    vmax = cfg.vmax(b)
    gbest = global_best(swarm).pbest_position
    moved = []
    for p in swarm:
        v = velocity_update(p, gbest, cfg, rng, vmax)
        x, v, inside = apply_wall(p.position + v, v, b, cfg.wall)
        moved.append((p, x, v, inside))

    out = []
    for p, x, v, inside in moved:
        if not inside:
            # invisible wall: not evaluated, cannot win gbest
            out.append(replace(p, position=x, velocity=v, fitness=np.inf, in_bounds=False))
            continue
        f = counter.evaluate(objective, x)
        if f < p.pbest_fitness:
            out.append(Particle(x, v, x.copy(), f, f, True))
        else:
            out.append(replace(p, position=x, velocity=v, fitness=f, in_bounds=True))
    return out


def best(swarm: list[Particle]) -> tuple[np.ndarray, float]:
    g = global_best(swarm)
    return g.pbest_position, g.pbest_fitness
