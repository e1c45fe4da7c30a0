"""Run the comparison experiments and write their curves.

Each experiment in configs/ is run through the CLI into results/<name>/,
producing trials.csv, trajectory_<label>.csv and summary.json. With
``--plot`` the average-best curves are also drawn (needs matplotlib).

    python scripts/run_experiments.py [--jobs 4] [--plot] [array_compare walls ...]
"""
import argparse
import csv
from pathlib import Path

from heppso.cli import main as cli

ROOT = Path(__file__).parents[1]
CONFIGS = ROOT / "configs"


def plot(out: Path, title: str):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for path in sorted(out.glob("trajectory_*.csv")):
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        ax.plot([int(r["evaluations"]) for r in rows], [float(r["average_best"]) for r in rows],
                label=path.stem.removeprefix("trajectory_"))
    ax.set_xlabel("fitness evaluations")
    ax.set_ylabel("average best fitness")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "average_best.png", dpi=120)
    plt.close(fig)


def main():
    names = sorted(p.stem for p in CONFIGS.glob("*.json"))
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("experiments", nargs="*", metavar="NAME", help=f"any of {', '.join(names)}")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    unknown = set(args.experiments) - set(names)
    if unknown:
        ap.error(f"unknown experiment(s): {', '.join(sorted(unknown))}")

    status = 0
    for name in args.experiments or names:
        out = args.out / name
        print(f"== {name}")
        status |= cli(["compare", "--config", str(CONFIGS / f"{name}.json"),
                       "--jobs", str(args.jobs), "--out", str(out)])
        if args.plot:
            plot(out, name)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
