"""Seeded multi-trial runner and convergence statistics.

A trial records ``(evaluations, best-so-far)`` after initialization and after
every generation. Trials are aggregated onto a common evaluation grid by
carrying the last best-so-far forward (step interpolation); the pointwise
minimum over trials is the best-of-trials curve and the pointwise mean the
average-best curve.
"""
from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import asdict, dataclass, field, is_dataclass
from typing import Callable, Sequence

import numpy as np
from joblib import Parallel, delayed

from heppso import ep, ga, hybrid, pso
from heppso.core import EvaluationCounter, Objective, RngStream, TrajectoryPoint, derive_seed

log = logging.getLogger(__name__)

# config type -> (initialize, generation step, best extractor)
ALGORITHMS: dict[type, tuple[Callable, Callable, Callable]] = {
    ep.EpConfig: (ep.initialize, ep.ep_generation, ep.best),
    pso.PsoConfig: (pso.initialize, pso.pso_step, pso.best),
    hybrid.HybridConfig: (hybrid.initialize, hybrid.hybrid_generation, hybrid.best),
    ga.GaConfig: (ga.initialize, ga.ga_generation, ga.best),
    ga.MicroGaConfig: (ga.micro_initialize, ga.micro_ga_generation, ga.best),
}

ALGORITHM_NAMES = {
    "ep": ep.EpConfig,
    "pso": pso.PsoConfig,
    "hybrid": hybrid.HybridConfig,
    "ga": ga.GaConfig,
    "micro-ga": ga.MicroGaConfig,
}


@dataclass
class TrialRecord:
    algorithm: str
    trial: int
    seed: int
    trajectory: list[TrajectoryPoint] = field(default_factory=list)
    best_solution: np.ndarray | None = None
    best_fitness: float = np.inf
    duration: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and bool(self.trajectory)

    @property
    def evaluations(self) -> np.ndarray:
        return np.array([p.evaluations for p in self.trajectory], dtype=np.int64)

    @property
    def fitness(self) -> np.ndarray:
        return np.array([p.best_fitness for p in self.trajectory], dtype=float)


def run_trial(config, objective: Objective, seed: int, generations: int,
              max_evaluations: int | None = None, algorithm: str = "",
              trial: int = 0) -> TrialRecord:
    """One seeded run. Stops after ``generations`` or once the evaluation
    budget ``max_evaluations`` is reached, whichever comes first."""
    init, step, best = ALGORITHMS[type(config)]
    rec = TrialRecord(algorithm or type(config).__name__, trial, seed)
    rng = RngStream(seed)
    counter = EvaluationCounter()
    t0 = time.perf_counter()
    try:
        state = init(objective, config, rng, counter)
        x, f = best(state)
        best_x, best_f = x.copy(), f
        rec.trajectory.append(TrajectoryPoint(counter.count, best_f))
        for _ in range(generations):
            if max_evaluations is not None and counter.count >= max_evaluations:
                break
            state = step(state, objective, config, rng, counter)
            x, f = best(state)
            if f < best_f:
                best_x, best_f = x.copy(), f
            rec.trajectory.append(TrajectoryPoint(counter.count, best_f))
        rec.best_solution, rec.best_fitness = best_x, float(best_f)
    except Exception as exc:  # surfaced per trial, the rest keep running
        log.exception("trial %d of %s failed", trial, rec.algorithm)
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.duration = time.perf_counter() - t0
    return rec


def run_trials(config, objective: Objective, n_trials: int, master_seed: int,
               generations: int, max_evaluations: int | None = None,
               algorithm: str = "", n_jobs: int = 1) -> list[TrialRecord]:
    """Trial ``i`` runs with ``derive_seed(master_seed, i)``."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    jobs = (delayed(run_trial)(config, objective, derive_seed(master_seed, i), generations,
                               max_evaluations, algorithm, i)
            for i in range(n_trials))
    if n_jobs == 1:
        return [fn(*a, **kw) for fn, a, kw in jobs]
    return list(Parallel(n_jobs=n_jobs)(jobs))


def step_values(evaluations, fitness, grid) -> np.ndarray:
    """Best-so-far at each grid count (carried forward; NaN before the first point)."""
    idx = np.searchsorted(np.asarray(evaluations), np.asarray(grid), side="right") - 1
    out = np.asarray(fitness, dtype=float)[np.clip(idx, 0, None)]
    return np.where(idx >= 0, out, np.nan)


def default_grid(records: Sequence[TrialRecord]) -> np.ndarray:
    """Union of recorded counts from the latest first point to the latest last point."""
    good = [r for r in records if r.ok]
    if not good:
        raise ValueError("no successful trials to aggregate")
    start = max(int(r.evaluations[0]) for r in good)
    counts = np.unique(np.concatenate([r.evaluations for r in good]))
    return counts[counts >= start]


@dataclass
class Aggregate:
    grid: np.ndarray
    best_of_trials: np.ndarray
    average_best: np.ndarray
    final_mean: float
    final_min: float
    final_max: float
    final_std: float
    n_trials: int
    n_failed: int

    def stats(self) -> dict:
        return {"mean": self.final_mean, "min": self.final_min, "max": self.final_max,
                "std": self.final_std, "trials": self.n_trials, "failed": self.n_failed}


@dataclass
class ComparisonReport:
    grid: np.ndarray
    algorithms: dict[str, Aggregate]


def aggregate(records: Sequence[TrialRecord], grid) -> Aggregate:
    good = [r for r in records if r.ok]
    if not good:
        raise ValueError("no successful trials to aggregate")
    grid = np.asarray(grid, dtype=np.int64)
    curves = np.array([step_values(r.evaluations, r.fitness, grid) for r in good])
    finals = np.array([r.best_fitness for r in good])
    return Aggregate(grid, curves.min(axis=0), curves.mean(axis=0),
                     float(finals.mean()), float(finals.min()), float(finals.max()),
                     float(finals.std()), len(good), len(records) - len(good))


def align_and_aggregate(records: dict[str, Sequence[TrialRecord]] | Sequence[TrialRecord],
                        grid=None) -> ComparisonReport:
    """Best-of-trials and average-best curves for each algorithm on one grid.

    ``records`` is either a mapping algorithm -> trials or a flat list that is
    grouped by ``TrialRecord.algorithm``.
    """
    if not isinstance(records, dict):
        grouped: dict[str, list[TrialRecord]] = {}
        for r in records:
            grouped.setdefault(r.algorithm, []).append(r)
        records = grouped
    if not records or not any(records.values()):
        raise ValueError("no trial records given")
    if grid is None:
        grid = default_grid([r for recs in records.values() for r in recs])
    grid = np.asarray(grid, dtype=np.int64)
    return ComparisonReport(grid, {name: aggregate(recs, grid) for name, recs in records.items()})


def final_at(records: Sequence[TrialRecord], evaluations: int) -> np.ndarray:
    """Per-trial best-so-far after ``evaluations`` objective calls."""
    return np.array([step_values(r.evaluations, r.fitness, [evaluations])[0]
                     for r in records if r.ok])


def common_budget(*groups: Sequence[TrialRecord]) -> int:
    """Largest evaluation count reached by every successful trial in every group."""
    return int(min(r.evaluations[-1] for g in groups for r in g if r.ok))


@dataclass
class TargetHits:
    counts: list[int | None]
    mean: float
    reach_rate: float


def evals_to_target(records: Sequence[TrialRecord], target: float) -> TargetHits:
    """First recorded evaluation count at which best-so-far <= target, per trial."""
    counts: list[int | None] = []
    for r in records:
        hit = np.flatnonzero(r.fitness <= target) if r.ok else np.array([])
        counts.append(int(r.evaluations[hit[0]]) if hit.size else None)
    reached = [c for c in counts if c is not None]
    mean = float(np.mean(reached)) if reached else float("nan")
    return TargetHits(counts, mean, len(reached) / len(counts) if counts else 0.0)


# --------------------------------------------------------------------------
# Export
# --------------------------------------------------------------------------

TRIAL_COLUMNS = ("algorithm", "trial", "seed", "evaluations", "best_fitness")


def _num(v: float) -> str:
    return repr(float(v))


def write_trials_csv(records: Sequence[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        for r in records:
            for p in r.trajectory:
                w.writerow([r.algorithm, r.trial, r.seed, p.evaluations, _num(p.best_fitness)])


def write_aggregate_csv(agg: Aggregate, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("evaluations", "best_of_trials", "average_best"))
        for g, b, a in zip(agg.grid, agg.best_of_trials, agg.average_best):
            w.writerow([int(g), _num(b), _num(a)])


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value  # enums
    return obj


def summary(records: dict[str, Sequence[TrialRecord]], config: dict | None = None,
            problem_name: str = "") -> dict:
    """JSON-ready summary: config echo, statistics and per-trial solutions.

    Wall-clock durations are left out so that repeated runs are byte-identical.
    """
    algos = {}
    for name, recs in records.items():
        good = [r for r in recs if r.ok]
        finals = np.array([r.best_fitness for r in good]) if good else np.array([np.nan])
        best = min(good, key=lambda r: r.best_fitness) if good else None
        algos[name] = {
            "statistics": {"mean": float(finals.mean()), "min": float(finals.min()),
                           "max": float(finals.max()), "std": float(finals.std()),
                           "trials": len(recs), "failed": len(recs) - len(good)},
            "best": None if best is None else {
                "trial": best.trial, "seed": best.seed, "fitness": best.best_fitness,
                "solution": best.best_solution},
            "trials": [{"trial": r.trial, "seed": r.seed, "fitness": r.best_fitness,
                        "evaluations": int(r.evaluations[-1]) if r.trajectory else 0,
                        "solution": r.best_solution, "error": r.error} for r in recs],
        }
    return _jsonable({"problem": problem_name, "config": config or {}, "algorithms": algos})


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
