"""Sphere sanity calibration.

Runs every optimizer on sphere(n=9) over the committed seed set and writes
the pass thresholds together with the observed hit rates to
tests/data/calibration.json. Thresholds are fixed here, before any tuning;
the observed rates are informational.

    python scripts/calibrate.py [--jobs 4]
"""
import argparse
import json
from pathlib import Path

import numpy as np

from heppso import EpConfig, GaConfig, HybridConfig, MicroGaConfig, PsoConfig
from heppso.harness import final_at, run_trials
from heppso.problems import sphere_objective

SEED = 1000
TRIALS = 20
BUDGET = 10_050  # 50 initial + 50 x 200 generations

# (config, per-module target, per-module rate)
RUNS = {
    "ep": (EpConfig(mu=50, q=15), 1e-2, 0.95),
    "pso": (PsoConfig(swarm_size=50), 1e-2, 0.90),
    "hybrid": (HybridConfig(mu=50, q=15), 1e-1, 0.80),
    "ga": (GaConfig(pop_size=50), 1e-1, 0.80),
    "micro-ga": (MicroGaConfig(), 1e-1, 0.80),
}
SHARED = {"target": 1e-1, "rate": 0.80}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default=Path(__file__).parents[1] / "tests" / "data" / "calibration.json")
    args = ap.parse_args()

    obj = sphere_objective(9)
    out = {"seed": SEED, "trials": TRIALS, "budget": BUDGET, "shared": dict(SHARED)}
    for name, (cfg, target, rate) in RUNS.items():
        recs = run_trials(cfg, obj, TRIALS, SEED, 100_000, BUDGET, name, args.jobs)
        at_budget = final_at(recs, BUDGET)
        out[name] = {
            "target": target,
            "rate": rate,
            "observed_rate": float(np.mean(at_budget < target)),
            "observed_shared_rate": float(np.mean(at_budget < SHARED["target"])),
            "observed_median": float(np.median(at_budget)),
        }
        print(f"{name:<10} rate={out[name]['observed_rate']:.2f} "
              f"median={out[name]['observed_median']:.3g}")
    with open(args.out, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
