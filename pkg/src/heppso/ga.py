"""Binary-coded GA and micro-GA baselines.

Each parameter is a ``bits_per_param`` unsigned integer mapped linearly onto
its bounds (all zeros -> lower, all ones -> upper). Both algorithms use
binary-tournament parent selection and uniform crossover. The micro-GA has
no mutation and restarts its non-elite members when they collapse onto the
elite; by default "collapse" is measured per encoded parameter, with a
per-bit measure available through ``MicroGaConfig.difference``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from heppso.core import Bounds, EvaluationCounter, Objective, RngStream


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 50
    pc: float = 0.7
    pm: float = 0.02
    bits_per_param: int = 16
    elitism: bool = True

    def __post_init__(self):
        if not (0 <= self.pc <= 1 and 0 <= self.pm <= 1):
            raise ValueError("pc and pm must be probabilities")
        if self.pop_size < 2:
            raise ValueError("pop_size must be at least 2")
        if not 1 <= self.bits_per_param <= 52:
            raise ValueError("bits_per_param must lie in [1, 52]")


@dataclass(frozen=True)
class MicroGaConfig:
    members: int = 6
    parents: int = 5
    elite: int = 1
    pc: float = 0.9
    restart_threshold: float = 0.20
    bits_per_param: int = 16
    difference: str = "genes"

    def __post_init__(self):
        if self.difference not in ("genes", "bits"):
            raise ValueError("difference must be 'genes' or 'bits'")
        if self.members != self.parents + self.elite:
            raise ValueError("members must equal parents + elite")
        if self.elite != 1:
            raise ValueError("the micro-GA keeps exactly one elite member")
        if not 0 <= self.pc <= 1:
            raise ValueError("pc must be a probability")


@dataclass(frozen=True)
class Member:
    bits: np.ndarray
    solution: np.ndarray
    fitness: float


def decode(bits, bounds: Bounds, bits_per_param: int = 16) -> np.ndarray:
    """Map a bit string (most significant bit first per field) onto the box."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bounds.dimension
    if bits.size != n * bits_per_param:
        raise ValueError(f"expected {n * bits_per_param} bits, got {bits.size}")
    weights = 2.0 ** np.arange(bits_per_param - 1, -1, -1)
    ints = bits.reshape(n, bits_per_param) @ weights
    return bounds.lower + ints / (2.0 ** bits_per_param - 1) * bounds.width


def encode(x, bounds: Bounds, bits_per_param: int = 16) -> np.ndarray:
    """Nearest bit string for ``x`` (inverse of :func:`decode` up to rounding)."""
    frac = (np.asarray(x, dtype=float) - bounds.lower) / bounds.width
    ints = np.rint(np.clip(frac, 0, 1) * (2 ** bits_per_param - 1)).astype(np.int64)
    shifts = np.arange(bits_per_param - 1, -1, -1)
    return ((ints[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def uniform_crossover(a, b, rng: RngStream):
    """Swap each bit position between the two parents with probability 1/2."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("parents must have equal length")
    swap = rng.uniform(a.shape) < 0.5
    return np.where(swap, b, a), np.where(swap, a, b)


def binary_tournament(fitness, rng: RngStream) -> int:
    i, j = rng.integers(len(fitness), 2)
    return int(i) if fitness[i] <= fitness[j] else int(j)


def _member(bits, objective: Objective, counter: EvaluationCounter, bpp: int) -> Member:
    x = decode(bits, objective.bounds, bpp)
    return Member(bits, x, counter.evaluate(objective, x))


def _random_members(k: int, objective: Objective, rng: RngStream, counter: EvaluationCounter,
                    bpp: int) -> list[Member]:
    pool = rng.bits((k, objective.dimension * bpp))
    return [_member(b, objective, counter, bpp) for b in pool]


def _elite_index(pop: list[Member]) -> int:
    return int(np.argmin([m.fitness for m in pop]))


def _breed(pop: list[Member], count: int, pc: float, rng: RngStream) -> list[np.ndarray]:
    fitness = [m.fitness for m in pop]
    children = []
    while len(children) < count:
        a = pop[binary_tournament(fitness, rng)].bits
        b = pop[binary_tournament(fitness, rng)].bits
        if rng.uniform() < pc:
            a, b = uniform_crossover(a, b, rng)
        children.extend([a.copy(), b.copy()])
    return children[:count]


def initialize(objective: Objective, cfg: GaConfig, rng: RngStream,
               counter: EvaluationCounter) -> list[Member]:
    return _random_members(cfg.pop_size, objective, rng, counter, cfg.bits_per_param)


def ga_generation(pop: list[Member], objective: Objective, cfg: GaConfig,
                  rng: RngStream, counter: EvaluationCounter) -> list[Member]:
    """Full replacement with one elite carried over without re-evaluation."""
    keep = [pop[_elite_index(pop)]] if cfg.elitism else []
    children = _breed(pop, cfg.pop_size - len(keep), cfg.pc, rng)
    flips = [rng.uniform(c.shape) < cfg.pm for c in children]
    children = [np.where(f, 1 - c, c).astype(np.uint8) for c, f in zip(children, flips)]
    return keep + [_member(c, objective, counter, cfg.bits_per_param) for c in children]


def gene_difference(elite_bits, bits, bits_per_param: int | None = None) -> float:
    """Fraction of genes where ``bits`` differs from the elite.

    With ``bits_per_param`` a gene is one encoded parameter (its whole bit
    field must match); without it every bit is a gene.
    """
    diff = np.asarray(elite_bits) != np.asarray(bits)
    if bits_per_param is not None:
        diff = diff.reshape(-1, bits_per_param).any(axis=1)
    return float(np.mean(diff))


def needs_restart(elite_bits, others, threshold: float = 0.20,
                  bits_per_param: int | None = None) -> bool:
    """True when every non-elite member differs from the elite in < threshold of its genes."""
    return all(gene_difference(elite_bits, b, bits_per_param) < threshold for b in others)


def micro_initialize(objective: Objective, cfg: MicroGaConfig, rng: RngStream,
                     counter: EvaluationCounter) -> list[Member]:
    return _random_members(cfg.members, objective, rng, counter, cfg.bits_per_param)


def micro_ga_generation(pop: list[Member], objective: Objective, cfg: MicroGaConfig,
                        rng: RngStream, counter: EvaluationCounter) -> list[Member]:
    elite = pop[_elite_index(pop)]
    children = _breed(pop, cfg.parents, cfg.pc, rng)
    field = cfg.bits_per_param if cfg.difference == "genes" else None
    if needs_restart(elite.bits, children, cfg.restart_threshold, field):
        children = list(rng.bits((cfg.parents, elite.bits.size)))
    return [elite] + [_member(c, objective, counter, cfg.bits_per_param) for c in children]


def best(pop: list[Member]) -> tuple[np.ndarray, float]:
    m = pop[_elite_index(pop)]
    return m.solution, m.fitness
