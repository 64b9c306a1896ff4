"""Command-line entry points.

Subcommands: gen (instance files), run (campaigns), sweep (single-instance
time series), bound (certified cut bounds), compare (paired H1/circuit runs),
plotdata (figure-ready CSV recipes). Settings live in JSON config files; the
few flags below override the corresponding config fields. --out always names
a directory. Exit codes: 0 on success, 2 when some instances failed (their
rows carry status="error"), 1 on configuration problems.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from ._version import __version__
from .harness import ConfigError, ExperimentConfig, RecipeError


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as config errors (exit 1)."""

    def error(self, message):
        raise ConfigError(message)


def _add_overrides(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, help="replace the config's seed list")
    sub.add_argument("--normalize", choices=["eq8", "none"])
    sub.add_argument("--grid", help="lo:hi:divisions")
    sub.add_argument("--order", choices=["0", "1", "2", "exp"])
    sub.add_argument("--objective", choices=["ratio", "pgs"])


def _load_raw_config(path: str | None, required: bool = True) -> dict:
    if path is None:
        if required:
            raise ConfigError("--config is required")
        return {}
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    raw = _load_raw_config(args.config)
    if getattr(args, "normalize", None):
        raw["normalize"] = args.normalize
    if getattr(args, "grid", None):
        raw["grid"] = args.grid
    if getattr(args, "order", None) is not None:
        raw["order"] = args.order if args.order == "exp" else int(args.order)
    if getattr(args, "objective", None):
        raw["objective"] = args.objective
    if getattr(args, "seed", None) is not None:
        raw["seeds"] = [args.seed]
    if getattr(args, "out", None):
        raw["out"] = args.out
    return ExperimentConfig.from_dict(raw)


def _cmd_gen(args) -> int:
    raw = _load_raw_config(args.config)
    path = harness.run_gen(raw, args.out or ".", seed_override=args.seed)
    print(f"wrote {path}")
    return 0


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    rows = harness.run_experiment(cfg)
    failures = [r for r in rows if r["status"] != "ok"]
    print(f"{len(rows) - len(failures)}/{len(rows)} instances ok")
    for row in failures:
        print(f"  {row['instance_id']}: {row['error']}", file=sys.stderr)
    if cfg.out:
        print(f"wrote {Path(cfg.out) / 'results.csv'}")
    return 2 if failures else 0


def _cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    rows = harness.run_sweep(cfg)
    print(f"{len(rows)} sweep points for {rows[0]['instance_id']}")
    if not cfg.out:
        for row in rows:
            print(f"  t={row['t']} ratio={row['ratio']} pgs={row['pgs']}")
    return 0


def _cmd_bound(args) -> int:
    raw = _load_raw_config(args.config, required=False)
    allowed = {"t", "quad_step", "kind", "subgraphs", "scan", "interval", "divisions"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown bound config keys: {sorted(unknown)}")
    t = float(raw.get("t", 0.093))
    quad_step = float(raw.get("quad_step", 1e-3))
    kind = raw.get("kind", "h1")
    subgraphs = tuple(raw.get("subgraphs", harness.BOUND_SUBGRAPHS))
    rows, worst = harness.run_bound(t, quad_step=quad_step, kind=kind, subgraphs=subgraphs)
    for row in rows:
        label = row["subgraph"]
        if row["local"]:
            print(
                f"{label}: local={float(row['local']):.4f} "
                f"eps={float(row['epsilon']):.4f} cut>={float(row['cut']):.4f}"
            )
    if worst is not None:
        print(f"worst-case guaranteed cut fraction: {worst:.4f}")
    out_rows = list(rows)
    if raw.get("scan"):
        interval = tuple(float(v) for v in raw.get("interval", (0.0, 0.2)))
        divisions = int(raw.get("divisions", 100))
        scan_rows, t_star, bound_star = harness.run_bound_scan(
            interval, divisions, quad_step
        )
        print(f"bound-optimal time: t*={t_star:.4f} with cut>={bound_star:.4f}")
        if args.out:
            harness.write_rows(
                Path(args.out) / "bound-scan.csv", harness.BOUND_COLUMNS, scan_rows
            )
    if args.out:
        harness.write_rows(Path(args.out) / "bound.csv", harness.BOUND_COLUMNS, out_rows)
        print(f"wrote {Path(args.out) / 'bound.csv'}")
    return 0


def _cmd_compare(args) -> int:
    cfg = _config_from_args(args)
    rows, summary = harness.run_compare(cfg)
    print(json.dumps(summary, indent=2))
    if cfg.out:
        print(f"wrote {Path(cfg.out) / 'compare.csv'}")
    return 2 if summary["errors"] else 0


def _cmd_plotdata(args) -> int:
    records: list[dict] = []
    for path in args.records:
        try:
            records.extend(harness.read_rows(path))
        except FileNotFoundError:
            raise ConfigError(f"records file not found: {path}") from None
    out = harness.emit_plotdata(records, args.figure, args.out or ".")
    print(f"wrote {out}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="commutopt", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate an instance file")
    gen.add_argument("--config", required=True)
    gen.add_argument("--seed", type=int, help="override the base seed")
    gen.add_argument("--out", help="output directory (default .)")
    gen.set_defaults(func=_cmd_gen)

    run = subs.add_parser("run", help="run a campaign config")
    run.add_argument("--config", required=True)
    _add_overrides(run)
    run.add_argument("--out", help="output directory for results.csv")
    run.set_defaults(func=_cmd_run)

    sweep = subs.add_parser("sweep", help="time series for a single instance")
    sweep.add_argument("--config", required=True)
    _add_overrides(sweep)
    sweep.add_argument("--out", help="output directory for the sweep CSV")
    sweep.set_defaults(func=_cmd_sweep)

    bound = subs.add_parser("bound", help="certified cut bounds from subgraphs")
    bound.add_argument("--config")
    bound.add_argument("--out", help="output directory for bound CSVs")
    bound.set_defaults(func=_cmd_bound)

    compare = subs.add_parser("compare", help="paired h1/circuit comparison")
    compare.add_argument("--config", required=True)
    _add_overrides(compare)
    compare.add_argument("--out", help="output directory for compare.csv")
    compare.set_defaults(func=_cmd_compare)

    plot = subs.add_parser("plotdata", help="figure-ready CSV from result rows")
    plot.add_argument("figure", choices=list(harness.RECIPES))
    plot.add_argument("records", nargs="+", help="result/sweep/bound CSV paths")
    plot.add_argument("--out", help="output directory (default .)")
    plot.set_defaults(func=_cmd_plotdata)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, RecipeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure, not a config problem
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
