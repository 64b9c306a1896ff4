#!/usr/bin/env python3
"""Corrected-Hamiltonian ordering experiment on rings.

For each requested correction order (0, 1, 2, and optionally the full
conjugated-exponential variant "exp"), optimize the single construction-time
parameter on a fixed grid and report the best ratio. Raw scale by default;
pass --normalize eq8 to rescale every operator to the common energy norm.
"""

import argparse
import time

from commutopt import ExperimentConfig, run_experiment


def run_one(n: int, order, grid, normalize: str, objective: str) -> dict:
    cfg = ExperimentConfig.from_dict({
        "method": "qz",
        "order": order,
        "normalize": normalize,
        "kind": "ring",
        "sizes": [n],
        "seeds": [0],
        "grid": grid,
        "objective": objective,
    })
    return run_experiment(cfg)[0]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10, help="ring size")
    ap.add_argument("--orders", default="0,1,2",
                    help="comma list from {0,1,2,exp}")
    ap.add_argument("--grid", default="0:0.3:3000")
    ap.add_argument("--normalize", choices=("none", "eq8"), default="none")
    ap.add_argument("--objective", choices=("ratio", "pgs"), default="ratio")
    args = ap.parse_args()

    lo, hi, div = args.grid.split(":")
    grid = (float(lo), float(hi), int(div))
    orders = [o if o == "exp" else int(o) for o in args.orders.split(",")]

    print(f"ring n={args.n}, grid {args.grid}, normalize={args.normalize}")
    for order in orders:
        t0 = time.perf_counter()
        row = run_one(args.n, order, grid, args.normalize, args.objective)
        dt = time.perf_counter() - t0
        if row["status"] != "ok":
            print(f"order {order}: {row['error']}")
            continue
        print(f"order {order}: best {args.objective} {float(row['ratio']):.6f} "
              f"at T={float(row['t_star']):.5f}  ({dt:.1f}s)")


if __name__ == "__main__":
    main()
