"""Objective functions: symmetric aperiodic array sidelobe level, flat-top
sector-beam synthesis on a strip-array stand-in, and the sphere function.

Array positions are in free-space wavelengths and measured from the array
centre; only the right half of a symmetric array is stored.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from heppso.core import Bounds, Objective

SPEED_OF_LIGHT = 299_792_458.0
DB_FLOOR = -200.0

# Published inter-element spacings (wavelengths) of the best 20-element design,
# innermost element first.
PUBLISHED_ARRAY_SPACINGS = (
    0.16347, 0.30039, 0.30095, 0.35352, 0.31826,
    0.37901, 0.41163, 0.45817, 0.59966,
)


def sphere(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.dot(x, x))


def sphere_objective(n: int = 9, low: float = -5.0, high: float = 5.0) -> Objective:
    return Objective(sphere, Bounds.uniform(low, high, n), name="sphere")


def to_db(magnitude) -> np.ndarray:
    """20*log10 of a field magnitude, floored at DB_FLOOR."""
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(np.abs(magnitude))
    return np.maximum(db, DB_FLOOR)


# --------------------------------------------------------------------------
# Symmetric linear array
# --------------------------------------------------------------------------

def array_factor(positions, u):
    """Normalized array factor of a symmetric, uniformly excited array.

    ``positions`` are the right-half element locations x_i (wavelengths) and
    ``u = sin(theta)``. AF(u) = |mean_i cos(2 pi x_i u)|, so AF(0) = 1.
    """
    x = np.asarray(positions, dtype=float)
    u = np.asarray(u, dtype=float)
    return np.abs(np.cos(2.0 * np.pi * np.multiply.outer(u, x)).mean(axis=-1))


def sidelobe_level_db(pattern) -> float:
    """Peak sidelobe of a sampled magnitude pattern, in dB relative to 1.

    The main beam runs from the first sample to the first local minimum;
    everything after it is sidelobe region. A pattern with no local minimum
    before its last sample has no sidelobe region and scores 0 dB.
    """
    p = np.asarray(pattern, dtype=float)
    rising = np.flatnonzero(np.diff(p) > 0.0)
    if rising.size == 0:
        return 0.0
    return float(to_db(p[rising[0]:].max()))


def array_factor_grid(positions, grid_points: int) -> np.ndarray:
    """:func:`array_factor` on ``np.linspace(0, 1, grid_points)``.

    Sample k is split as k = B*b + r and cos(a(Bb + r)) expanded by the angle
    addition formula, so the whole grid costs two small matrix products
    instead of one cosine per sample and element.
    """
    x = np.asarray(positions, dtype=float)
    block = math.isqrt(grid_points - 1) + 1
    n_blocks = -(-grid_points // block)
    step = 2.0 * np.pi * x / (grid_points - 1)
    fine = np.multiply.outer(step, np.arange(block))
    coarse = np.multiply.outer(step, block * np.arange(n_blocks))
    total = np.cos(coarse).T @ np.cos(fine) - np.sin(coarse).T @ np.sin(fine)
    return np.abs(total.ravel()[:grid_points]) / x.size


def max_sidelobe_level(positions, grid_points: int = 4001) -> float:
    """Peak sidelobe level (dB) of the array on a uniform u-grid over [0, 1]."""
    if grid_points < 2001:
        raise ValueError("grid_points must be at least 2001")
    return sidelobe_level_db(array_factor_grid(positions, grid_points))


def positions_from_spacings(spacings) -> np.ndarray:
    """Cumulative element positions from centre-outward spacings."""
    return np.cumsum(np.asarray(spacings, dtype=float))


PUBLISHED_ARRAY_POSITIONS = tuple(positions_from_spacings(PUBLISHED_ARRAY_SPACINGS))


@dataclass(frozen=True)
class ArrayProblem:
    """Max-SLL minimization of a 20-element symmetric aperiodic array.

    Nine inner half-array positions are free; the outermost sits at
    ``fixed_outer``. Constraint violations add ``penalty`` dB per wavelength.
    """

    num_elements: int = 20
    aperture: float = 8.0
    min_spacing: float = 0.3
    min_position: float = 0.15
    u_grid_points: int = 4001
    penalty: float = 100.0

    @property
    def fixed_outer(self) -> float:
        return self.aperture / 2.0

    @property
    def dimension(self) -> int:
        return self.num_elements // 2 - 1

    @property
    def bounds(self) -> Bounds:
        return Bounds.uniform(0.0, self.fixed_outer, self.dimension)

    def design(self, x) -> np.ndarray:
        """Sorted half-array positions with the fixed outer element appended."""
        x = np.sort(np.asarray(x, dtype=float))
        return np.append(x, self.fixed_outer)

    def violations(self, x) -> dict[str, float]:
        """Constraint violations in wavelengths, keyed by constraint name."""
        pos = self.design(x)
        free = pos[:-1]
        gaps = np.diff(pos)
        return {
            "min_position": float(max(0.0, self.min_position - pos[0])),
            "min_spacing": float(np.clip(self.min_spacing - gaps, 0.0, None).sum()),
            "box_lower": float(np.clip(-free, 0.0, None).sum()),
            "box_upper": float(np.clip(free - self.fixed_outer, 0.0, None).sum()),
        }

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} positions, got shape {x.shape}")
        sll = max_sidelobe_level(self.design(x), self.u_grid_points)
        return sll + self.penalty * sum(self.violations(x).values())

    def objective(self) -> Objective:
        return Objective(self, self.bounds, name="array")

    def pattern(self, x, theta_deg):
        """Normalized dB pattern at the given angles (degrees from broadside)."""
        u = np.sin(np.deg2rad(np.asarray(theta_deg, dtype=float)))
        return to_db(array_factor(self.design(x), u))


def array_fitness(x, problem: ArrayProblem | None = None) -> float:
    """Max SLL of the design ``x`` (9 free positions) plus constraint penalty."""
    return (problem or ArrayProblem())(x)


# --------------------------------------------------------------------------
# Flat-top sector beam on a strip-array stand-in
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PrsDesign:
    """Symmetric strip metasurface: centre-outward spacings, one strip length
    and the feed distance, all in millimetres."""

    spacings: tuple[float, ...]
    length: float = 6.5
    distance: float = 8.0

    @classmethod
    def from_vector(cls, x) -> "PrsDesign":
        x = np.asarray(x, dtype=float)
        return cls(tuple(x[:-2]), float(x[-2]), float(x[-1]))

    def to_vector(self) -> np.ndarray:
        return np.array([*self.spacings, self.length, self.distance], dtype=float)

    @property
    def num_elements(self) -> int:
        return 2 * len(self.spacings) + 1


def synthetic_prs_pattern(design: PrsDesign, theta_deg, frequency_hz: float = 26.35e9):
    """dB pattern of the strips treated as a uniformly excited linear array.

    Strip positions are the cumulative spacings on each side of a centre
    strip. Strip length and feed distance do not enter this model. Peak is
    0 dB at broadside.
    """
    wavelength_mm = SPEED_OF_LIGHT / frequency_hz * 1e3
    pos = positions_from_spacings(design.spacings) / wavelength_mm
    u = np.sin(np.deg2rad(np.asarray(theta_deg, dtype=float)))
    af = 1.0 + 2.0 * np.cos(2.0 * np.pi * np.multiply.outer(u, pos)).sum(axis=-1)
    return to_db(af / design.num_elements)


@dataclass(frozen=True)
class FlatTopTerms:
    ripple: float
    excess: float
    sidelobe: float

    @property
    def total(self) -> float:
        return self.ripple + self.excess + self.sidelobe


def flat_top_terms(sector_db, sll_db: float, delta: float, sll_cap_db: float,
                   q1: float, q2: float) -> FlatTopTerms:
    """The three penalty terms of the flat-top objective.

    ``sector_db`` are the normalized pattern samples inside the sector.
    ripple: sum of |dB| deviations from the 0 dB peak.
    excess: q1 * (|dB| - delta) summed over samples whose deviation exceeds delta.
    sidelobe: q2 * (sll_db - sll_cap_db) when the sidelobe rises above the cap.
    """
    dev = np.abs(np.asarray(sector_db, dtype=float))
    ripple = float(dev.sum())
    over = dev > delta
    excess = float(q1 * (dev[over] - delta).sum())
    sidelobe = float(q2 * (sll_db - sll_cap_db)) if sll_db > sll_cap_db else 0.0
    return FlatTopTerms(ripple, excess, sidelobe)


@dataclass(frozen=True)
class FlatTopProblem:
    """Sector (flat-top) pattern synthesis over a symmetric strip array.

    The pattern is sampled at ``m_theta + 1`` angles on ``[0, theta_max]``
    for the ripple terms, and on a ``resolution_deg`` grid over
    ``[theta_max, 90]`` for the sidelobe term.
    """

    theta_max: float = 60.0
    delta: float = 0.0
    sll_cap: float = -10.0
    q1: float = 1.0
    q2: float = 100.0
    m_theta: int = 60
    resolution_deg: float = 0.1
    num_spacings: int = 10
    frequency_hz: float = 26.35e9
    spacing_range: tuple[float, float] = (0.1, 1.0)
    length_range: tuple[float, float] = (4.0, 8.0)
    distance_range: tuple[float, float] = (4.0, 10.0)
    box_penalty: float = 1000.0

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if self.q1 < 0 or self.q2 < 0:
            raise ValueError("penalty weights must be non-negative")
        if not 0 < self.theta_max < 90:
            raise ValueError("theta_max must lie in (0, 90) degrees")

    @property
    def dimension(self) -> int:
        return self.num_spacings + 2

    @property
    def bounds(self) -> Bounds:
        lo = [self.spacing_range[0]] * self.num_spacings + [self.length_range[0], self.distance_range[0]]
        hi = [self.spacing_range[1]] * self.num_spacings + [self.length_range[1], self.distance_range[1]]
        return Bounds(np.array(lo), np.array(hi))

    @property
    def sector_angles(self) -> np.ndarray:
        return np.linspace(0.0, self.theta_max, self.m_theta + 1)

    @property
    def outer_angles(self) -> np.ndarray:
        n = int(round((90.0 - self.theta_max) / self.resolution_deg)) + 1
        return np.linspace(self.theta_max, 90.0, n)

    def pattern(self, design: PrsDesign, theta_deg):
        return synthetic_prs_pattern(design, theta_deg, self.frequency_hz)

    def sidelobe_db(self, design: PrsDesign) -> float:
        """Peak level beyond the first local minimum after ``theta_max``.

        When the pattern falls monotonically to 90 degrees the level at 90
        degrees is used, so a broad pattern never escapes the cap.
        """
        outer = self.pattern(design, self.outer_angles)
        rising = np.flatnonzero(np.diff(outer) > 0.0)
        if rising.size == 0:
            return float(outer[-1])
        return float(outer[rising[0]:].max())

    def terms(self, design: PrsDesign) -> FlatTopTerms:
        sector = self.pattern(design, self.sector_angles)
        return flat_top_terms(sector, self.sidelobe_db(design), self.delta,
                              self.sll_cap, self.q1, self.q2)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} parameters, got shape {x.shape}")
        b = self.bounds
        outside = np.clip(b.lower - x, 0.0, None).sum() + np.clip(x - b.upper, 0.0, None).sum()
        # spacings are clipped to stay physical; the penalty carries the violation
        design = PrsDesign.from_vector(np.clip(x, b.lower, b.upper))
        return flat_top_fitness(design, self) + self.box_penalty * float(outside)

    def objective(self) -> Objective:
        return Objective(self, self.bounds, name="flat-top")

    def violations(self, x) -> dict[str, float]:
        design = PrsDesign.from_vector(x)
        b = self.bounds
        v = np.asarray(x, dtype=float)
        return {
            "box_lower": float(np.clip(b.lower - v, 0.0, None).sum()),
            "box_upper": float(np.clip(v - b.upper, 0.0, None).sum()),
            "sidelobe_cap_db": float(max(0.0, self.sidelobe_db(design) - self.sll_cap)),
        }


def flat_top_fitness(design: PrsDesign, problem: FlatTopProblem | None = None) -> float:
    """Ripple + q1-weighted excess + q2-weighted sidelobe-cap violation."""
    problem = problem or FlatTopProblem()
    return problem.terms(design).total


# --------------------------------------------------------------------------
# Plain-text design records
# --------------------------------------------------------------------------

def design_to_record(problem: str, x) -> dict:
    x = [float(v) for v in np.asarray(x, dtype=float)]
    if problem == "array":
        return {"problem": "array", "positions": x}
    if problem == "flat-top":
        d = PrsDesign.from_vector(x)
        return {"problem": "flat-top", **{k: (list(v) if isinstance(v, tuple) else v)
                                          for k, v in asdict(d).items()}}
    return {"problem": problem, "x": x}


def record_to_vector(record: dict) -> np.ndarray:
    """Solution vector from a JSON design record.

    Array records give either ``positions`` (9 free positions) or
    ``spacings`` (centre-outward gaps; the cumulative sum is used and a
    trailing element at the outer position is dropped). Flat-top records
    give ``spacings``, ``length`` and ``distance``. Any record may instead
    give the raw vector as ``x``.
    """
    if "x" in record:
        return np.asarray(record["x"], dtype=float)
    problem = record.get("problem", "array")
    if problem == "array":
        if "positions" in record:
            return np.asarray(record["positions"], dtype=float)
        pos = positions_from_spacings(record["spacings"])
        outer = ArrayProblem().fixed_outer
        if pos.size and np.isclose(pos[-1], outer, atol=1e-3):
            pos = pos[:-1]
        return pos
    if problem == "flat-top":
        return PrsDesign(tuple(record["spacings"]), float(record.get("length", 6.5)),
                         float(record.get("distance", 8.0))).to_vector()
    raise ValueError(f"unknown problem {problem!r}")


PROBLEMS = {
    "array": lambda **kw: ArrayProblem(**kw).objective(),
    "flat-top": lambda **kw: FlatTopProblem(**{k: tuple(v) if isinstance(v, list) else v
                                               for k, v in kw.items()}).objective(),
    "sphere": lambda **kw: sphere_objective(**kw),
}


def make_problem(name: str, **params) -> Objective:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    return factory(**params)
