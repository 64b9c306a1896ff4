#!/usr/bin/env python3
"""Paired commutator-dynamics vs depth-p circuit comparison on a seeded
ensemble. Prints the dominance fraction, the median optimal time, and the
mean circuit/commutator time ratio; optionally persists the row data."""

import argparse
import json

from commutopt import ExperimentConfig, run_compare


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", choices=("erdos", "sk", "regular", "ring"),
                    default="erdos")
    ap.add_argument("--sizes", default="6,8,10,12")
    ap.add_argument("--seeds", default="0,1,2,3,4,5,6,7")
    ap.add_argument("--p", type=int, default=1, help="circuit depth")
    ap.add_argument("--grid", default="0:6.283185307179586:1000",
                    help="time search grid for the commutator method")
    ap.add_argument("--normalize", choices=("none", "eq8"), default="none")
    ap.add_argument("--time-capped", action="store_true",
                    help="add rows re-optimized under the circuit's runtime")
    ap.add_argument("--out", default=None, help="output directory")
    args = ap.parse_args()

    lo, hi, div = args.grid.split(":")
    cfg = ExperimentConfig.from_dict({
        "method": "h1",
        "normalize": args.normalize,
        "kind": args.kind,
        "sizes": [int(v) for v in args.sizes.split(",")],
        "seeds": [int(v) for v in args.seeds.split(",")],
        "grid": (float(lo), float(hi), int(div)),
        "objective": "ratio",
        "p": args.p,
        "time_capped": args.time_capped,
        "out": args.out,
    })
    rows, summary = run_compare(cfg)
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
