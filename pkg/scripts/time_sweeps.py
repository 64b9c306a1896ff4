#!/usr/bin/env python3
"""Time series of energy / ratio / ground-probability for one instance.

Examples:
    python scripts/time_sweeps.py --kind ring --n 8 --grid 0:0.5:200
    python scripts/time_sweeps.py --kind sk --n 8 --seed 3 --method qz --order 2
"""

import argparse
import csv
import sys
from pathlib import Path

from commutopt import ExperimentConfig, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--kind", default="ring")
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--method", choices=("h1", "qz", "ring-analytic"), default="h1")
    ap.add_argument("--order", default=None, help="qz only: 0|1|2|exp")
    ap.add_argument("--grid", default="0:0.5:200")
    ap.add_argument("--normalize", choices=("none", "eq8"), default="none")
    ap.add_argument("--out", default="results/sweep.csv")
    args = ap.parse_args()

    lo, hi, div = args.grid.split(":")
    raw = {
        "method": args.method,
        "normalize": args.normalize,
        "kind": args.kind,
        "sizes": [args.n],
        "seeds": [args.seed],
        "grid": (float(lo), float(hi), int(div)),
        "objective": "ratio",
    }
    if args.method == "qz":
        if args.order is None:
            sys.exit("--order is required with --method qz")
        raw["order"] = args.order if args.order == "exp" else int(args.order)
    rows = run_sweep(ExperimentConfig.from_dict(raw))

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    best = max(rows, key=lambda r: float(r["ratio"]))
    print(f"{len(rows)} points -> {out}; peak ratio {float(best['ratio']):.4f} "
          f"at t={float(best['t']):.4f}")


if __name__ == "__main__":
    main()
