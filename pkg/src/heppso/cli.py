"""Command-line interface: ``run``, ``compare`` and ``evaluate``.

Experiments are described by a JSON file::

    {
      "problem": {"name": "array", "params": {}},
      "algorithms": [{"name": "hybrid", "label": "EP-PSO", "params": {"q": 15}}],
      "population": 50, "generations": 200, "trials": 20, "seed": 0
    }

``population`` fills ``mu``/``swarm_size``/``pop_size`` unless an algorithm's
own params set it. Flags override file values.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import re
import sys
from pathlib import Path

import jsonschema
import numpy as np

from heppso import harness
from heppso.problems import (
    ArrayProblem,
    FlatTopProblem,
    PrsDesign,
    make_problem,
    max_sidelobe_level,
    record_to_vector,
)

log = logging.getLogger("heppso")

ALGO_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"enum": sorted(harness.ALGORITHM_NAMES)},
        "label": {"type": "string", "minLength": 1},
        "params": {"type": "object"},
    },
    "required": ["name"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "problem": {
            "oneOf": [
                {"enum": ["array", "flat-top", "sphere"]},
                {"type": "object",
                 "properties": {"name": {"enum": ["array", "flat-top", "sphere"]},
                                "params": {"type": "object"}},
                 "required": ["name"], "additionalProperties": False},
            ]
        },
        "algorithm": ALGO_SCHEMA,
        "algorithms": {"type": "array", "items": ALGO_SCHEMA, "minItems": 1},
        "population": {"type": "integer", "minimum": 1},
        "generations": {"type": "integer", "minimum": 0},
        "max_evaluations": {"type": ["integer", "null"], "minimum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "jobs": {"type": "integer", "minimum": 1},
        "out": {"type": "string"},
    },
    "additionalProperties": False,
}

PROBLEM_DEFAULTS = {
    "array": {"population": 50, "generations": 200},
    "flat-top": {"population": 20, "generations": 100},
    "sphere": {"population": 50, "generations": 200},
}

SIZE_FIELD = {"ep": "mu", "hybrid": "mu", "pso": "swarm_size", "ga": "pop_size"}


class ConfigError(ValueError):
    pass


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None


def resolve_config(raw: dict, overrides: dict) -> dict:
    """Validate ``raw`` and fill defaults; returns the fully resolved config."""
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None
    cfg = dict(raw)
    problem = cfg.get("problem", "array")
    if isinstance(problem, str):
        problem = {"name": problem}
    problem = {"name": problem["name"], "params": dict(problem.get("params", {}))}
    cfg["problem"] = problem
    if "algorithm" in cfg and "algorithms" in cfg:
        raise ConfigError("give either 'algorithm' or 'algorithms', not both")
    algos = cfg.pop("algorithms", None) or [cfg.pop("algorithm", {"name": "hybrid"})]
    cfg.pop("algorithm", None)
    for k, v in PROBLEM_DEFAULTS[problem["name"]].items():
        cfg.setdefault(k, v)
    cfg.setdefault("max_evaluations", None)
    cfg.setdefault("trials", 20)
    cfg.setdefault("seed", 0)
    cfg.setdefault("jobs", 1)
    cfg.setdefault("out", "results")
    cfg.update({k: v for k, v in overrides.items() if v is not None})

    resolved = []
    labels = set()
    for a in algos:
        params = dict(a.get("params", {}))
        field = SIZE_FIELD.get(a["name"])
        if field:
            params.setdefault(field, cfg["population"])
        label = a.get("label", a["name"])
        if label in labels:
            raise ConfigError(f"duplicate algorithm label {label!r}")
        labels.add(label)
        build_algorithm(a["name"], params)  # validate now
        resolved.append({"name": a["name"], "label": label, "params": params})
    cfg["algorithms"] = resolved
    build_problem(problem)
    return cfg


def build_algorithm(name: str, params: dict):
    cls = harness.ALGORITHM_NAMES[name]
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(params) - known
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    try:
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in params.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from None


def build_problem(problem: dict):
    try:
        return make_problem(problem["name"], **problem["params"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad parameters for problem {problem['name']}: {exc}") from None


def describe(problem_name: str, objective, x) -> dict:
    """Fitness plus problem-specific diagnostics for a solution vector."""
    x = np.asarray(x, dtype=float)
    out = {"fitness": objective(x)}
    fn = objective.fn
    if isinstance(fn, ArrayProblem):
        viol = fn.violations(x)
        out.update(positions=fn.design(x).tolist(),
                   sll_db=max_sidelobe_level(fn.design(x), fn.u_grid_points),
                   violations=viol, feasible=not any(v > 0 for v in viol.values()))
    elif isinstance(fn, FlatTopProblem):
        design = PrsDesign.from_vector(np.clip(x, fn.bounds.lower, fn.bounds.upper))
        terms = fn.terms(design)
        viol = fn.violations(x)
        out.update(ripple=terms.ripple, excess=terms.excess, sidelobe_penalty=terms.sidelobe,
                   sll_db=fn.sidelobe_db(design), violations=viol,
                   feasible=not any(v > 0 for v in viol.values()))
    return out


def _safe(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label)


def execute(cfg: dict, compare: bool) -> dict:
    objective = build_problem(cfg["problem"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    records = {}
    for a in cfg["algorithms"]:
        algo = build_algorithm(a["name"], a["params"])
        log.info("running %s: %d trials", a["label"], cfg["trials"])
        records[a["label"]] = harness.run_trials(
            algo, objective, cfg["trials"], cfg["seed"], cfg["generations"],
            cfg["max_evaluations"], a["label"], cfg["jobs"])

    flat = [r for recs in records.values() for r in recs]
    harness.write_trials_csv(flat, out / "trials.csv")
    # output location is not part of the experiment; leaving it out keeps
    # summaries from identical runs byte-identical wherever they are written
    echo = {k: v for k, v in cfg.items() if k != "out"}
    summary = harness.summary(records, echo, cfg["problem"]["name"])
    for label, recs in records.items():
        entry = summary["algorithms"][label]
        good = [r for r in recs if r.ok]
        if good:
            best = min(good, key=lambda r: r.best_fitness)
            entry["best"]["report"] = harness._jsonable(
                describe(cfg["problem"]["name"], objective, best.best_solution))

    if compare:
        report = harness.align_and_aggregate(records)
        budget = harness.common_budget(*records.values())
        summary["common_budget"] = budget
        for label, agg in report.algorithms.items():
            harness.write_aggregate_csv(agg, out / f"trajectory_{_safe(label)}.csv")
            summary["algorithms"][label]["at_common_budget"] = {
                "mean": float(np.mean(harness.final_at(records[label], budget)))}
    harness.write_json(summary, out / "summary.json")
    print_table(summary)
    failed = sum(1 for r in flat if not r.ok)
    if failed:
        print(f"{failed} trial(s) failed; see summary.json", file=sys.stderr)
    return {"records": records, "summary": summary, "failed": failed}


def print_table(summary: dict) -> None:
    print(f"{'algorithm':<20}{'trials':>7}{'mean':>14}{'min':>14}{'max':>14}{'std':>12}")
    for label, entry in summary["algorithms"].items():
        s = entry["statistics"]
        print(f"{label:<20}{s['trials']:>7}{s['mean']:>14.5g}{s['min']:>14.5g}"
              f"{s['max']:>14.5g}{s['std']:>12.4g}")


def cmd_run(args) -> int:
    cfg = resolve_config(load_config(args.config), _overrides(args))
    if len(cfg["algorithms"]) != 1:
        raise ConfigError("'run' takes exactly one algorithm; use 'compare' for several")
    return 0 if execute(cfg, compare=False)["failed"] == 0 else 1


def cmd_compare(args) -> int:
    cfg = resolve_config(load_config(args.config), _overrides(args))
    return 0 if execute(cfg, compare=True)["failed"] == 0 else 1


def cmd_evaluate(args) -> int:
    try:
        with open(args.solution) as fh:
            record = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read solution {args.solution}: {exc}") from None
    name = args.problem or record.get("problem", "array")
    record = {**record, "problem": name}
    objective = build_problem({"name": name, "params": {}})
    try:
        x = record_to_vector(record)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad solution record: {exc}") from None
    if x.shape != (objective.dimension,):
        raise ConfigError(f"solution has {x.size} parameters; problem {name!r} "
                          f"expects {objective.dimension}")
    info = describe(name, objective, x)
    print(f"problem: {name}")
    print(f"fitness: {info['fitness']:.6f}")
    if "sll_db" in info:
        print(f"max SLL: {info['sll_db']:.4f} dB")
    if "feasible" in info:
        print("feasible" if info["feasible"] else "infeasible")
        for k, v in info["violations"].items():
            if v > 0:
                print(f"  violation {k}: {v:.6g}")

    if args.resolution <= 0:
        raise ConfigError("resolution must be positive")
    theta = np.linspace(-90.0, 90.0, int(round(180.0 / args.resolution)) + 1)
    fn = objective.fn
    if isinstance(fn, ArrayProblem):
        pattern = fn.pattern(x, theta)
    elif isinstance(fn, FlatTopProblem):
        pattern = fn.pattern(PrsDesign.from_vector(np.clip(x, fn.bounds.lower, fn.bounds.upper)),
                             theta)
    else:
        return 0
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        fh = open(path / "pattern.csv", "w", newline="")
    else:
        fh = sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("theta_deg", "pattern_db"))
    for t, p in zip(theta, pattern):
        w.writerow([f"{t:.6g}", repr(float(p))])
    if fh is not sys.stdout:
        fh.close()
        print(f"pattern written to {path / 'pattern.csv'}")
    return 0


def _overrides(args) -> dict:
    return {"seed": args.seed, "trials": args.trials, "jobs": args.jobs, "out": args.out}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heppso", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, help_ in (("run", cmd_run, "run one algorithm over seeded trials"),
                            ("compare", cmd_compare, "run several algorithms and aggregate")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", metavar="PATH")
        s.add_argument("--seed", type=int)
        s.add_argument("--trials", type=int)
        s.add_argument("--jobs", type=int)
        s.add_argument("--out", metavar="DIR")
        s.set_defaults(func=fn)
    s = sub.add_parser("evaluate", help="score a saved solution and dump its pattern")
    s.add_argument("solution", metavar="SOLUTION")
    s.add_argument("--problem", choices=["array", "flat-top", "sphere"])
    s.add_argument("--out", metavar="DIR", help="write pattern.csv here instead of stdout")
    s.add_argument("--resolution", type=float, default=0.1, help="pattern step in degrees")
    s.set_defaults(func=cmd_evaluate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
