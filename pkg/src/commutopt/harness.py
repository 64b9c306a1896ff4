"""Experiment orchestration: configs, dispatch, persistence, plot recipes.

A campaign is a JSON config resolved into an ExperimentConfig, a list of
instances (from an NDJSON file or a seeded generator spec), and one results
row per instance. Rows are plain dicts matching RESULT_COLUMNS so they write
to CSV losslessly; numbers are formatted with shortest-roundtrip repr, which
makes reruns byte-identical apart from wall_time_ms. Failures are isolated:
an instance that raises produces a status="error" row and never aborts the
campaign. Parallelism is instance-level (COMMUTOPT_WORKERS processes);
each instance's evolution stays sequential so floating-point summation order
is fixed.

The corrected-series methods (order 1 and 2) rebuild the operator at every
grid time. SeriesEvolver exploits the structure: the three series components
share a sparsity pattern grouped by X-mask (each mask contributes one
permutation diagonal), so the matrix at any T is three axpys on precomputed
column-amplitude vectors, and the energy normalization factor is the root of
a precomputed quartic in T.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import pauli as pl
from ._version import __version__
from .dynamics import (
    DEFAULT_TOL,
    Metrics,
    StateVector,
    _expmv,
    evolve_qz_exp_corrected,
    golden_section_max,
    measure,
    optimize_time,
    plus_state,
    time_sweep,
)
from .instances import (
    Graph,
    InvalidInstanceError,
    ResourceLimitError,
    diagonal_spectrum,
    generate,
    graph_to_record,
    load_instances,
    record_to_graph,
)
from .locality import (
    BOUND_SUBGRAPHS,
    get_subgraph,
    lrb_cut_bound,
    worst_case_bound,
    worst_case_over_time,
)
from .qaoa import qaoa_optimize
from .ringfermion import ring_energy_and_pgs, ring_ground_energy, ring_optimize
from .transfer import lpa_metrics

RESULT_COLUMNS = [
    "instance_id",
    "method",
    "order",
    "normalized",
    "objective",
    "t_star",
    "ratio",
    "pgs",
    "sigma",
    "grid_lo",
    "grid_hi",
    "divisions",
    "wall_time_ms",
    "params_gammas",
    "params_betas",
    "status",
    "error",
    "config_hash",
    "version",
]

SWEEP_COLUMNS = [
    "instance_id",
    "method",
    "order",
    "normalized",
    "t",
    "energy",
    "ratio",
    "pgs",
    "sigma",
]

BOUND_COLUMNS = ["subgraph", "t", "kind", "local", "epsilon", "upper", "cut"]

METHODS = ("h1", "qz", "qaoa", "ring-analytic", "lpa")
QZ_EXP_CAP = 10


class ConfigError(ValueError):
    """A config file or flag combination the harness cannot run."""


def parse_grid(text: str) -> tuple[float, float, int]:
    """Parse "lo:hi:divisions" (the CLI grid syntax)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be lo:hi:divisions, got {text!r}")
    try:
        lo, hi, div = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None
    if not (0 <= lo < hi) or div < 2:
        raise ConfigError(f"grid needs 0 <= lo < hi and divisions >= 2, got {text!r}")
    return lo, hi, div


@dataclass
class ExperimentConfig:
    """One campaign: an instance source, a method, and search settings."""

    method: str = "h1"
    instances_file: str | None = None
    kind: str | None = None
    sizes: tuple[int, ...] = ()
    seeds: tuple[int, ...] = ()
    edge_prob: float | None = None
    order: int | str | None = None  # corrected-series order: 0 | 1 | 2 | "exp"
    p: int = 1  # circuit depth
    fname: str = "identity"  # spectral weight tag
    normalize: str = "none"  # "none" | "eq8"
    objective: str = "ratio"
    grid: tuple[float, float, int] = (0.0, 2.0, 200)
    grid_only: bool = False
    tol: float = DEFAULT_TOL
    time_capped: bool = False  # compare only: add duration-constrained reruns
    out: str | None = None

    _KEYS = (
        "method instances_file kind sizes seeds edge_prob order p fname "
        "normalize objective grid grid_only tol time_capped out"
    ).split()

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        unknown = set(raw) - set(cls._KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        if isinstance(kwargs.get("grid"), str):
            kwargs["grid"] = parse_grid(kwargs["grid"])
        elif "grid" in kwargs:
            lo, hi, div = kwargs["grid"]
            kwargs["grid"] = (float(lo), float(hi), int(div))
        for key in ("sizes", "seeds"):
            if key in kwargs:
                kwargs[key] = tuple(int(v) for v in kwargs[key])
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.normalize not in ("none", "eq8"):
            raise ConfigError(f"normalize must be eq8|none, got {self.normalize!r}")
        if self.objective not in ("ratio", "pgs"):
            raise ConfigError(f"objective must be ratio|pgs, got {self.objective!r}")
        lo, hi, div = self.grid
        if not (0 <= lo < hi) or div < 2:
            raise ConfigError(f"invalid grid {self.grid}")
        if self.method == "qz":
            if self.order not in (0, 1, 2, "exp"):
                raise ConfigError("method qz requires order 0|1|2|exp")
        if self.method == "qaoa" and self.p < 1:
            raise ConfigError("p must be >= 1")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.instances_file is None:
            if self.kind is None or not self.sizes or not self.seeds:
                raise ConfigError(
                    "need instances_file, or kind + sizes + seeds, as instance source"
                )

    def canonical(self) -> dict:
        """Scientific fields only (output paths excluded), stable ordering."""
        out = dataclasses.asdict(self)
        out.pop("out")
        out["grid"] = list(self.grid)
        out["sizes"] = list(self.sizes)
        out["seeds"] = list(self.seeds)
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return ExperimentConfig.from_dict(raw)


def resolve_instances(cfg: ExperimentConfig) -> list[dict]:
    """Instance records for a campaign, with unique-id enforcement."""
    if cfg.instances_file is not None:
        try:
            records = load_instances(cfg.instances_file)
        except FileNotFoundError:
            raise ConfigError(
                f"instances file not found: {cfg.instances_file}"
            ) from None
    else:
        records = []
        for n in cfg.sizes:
            for seed in cfg.seeds:
                kwargs = {}
                if cfg.kind == "erdos" and cfg.edge_prob is not None:
                    kwargs["edge_prob"] = cfg.edge_prob
                g = generate(cfg.kind, n, seed, **kwargs)
                records.append(graph_to_record(g, cfg.kind, seed))
    seen = set()
    for rec in records:
        if rec["id"] in seen:
            raise ConfigError(f"duplicate instance id {rec['id']!r}")
        seen.add(rec["id"])
    return records


# -- corrected-series fast evaluation -----------------------------------------


class SeriesEvolver:
    """H(T) = C0 + T C1 + T^2 C2 applied through X-mask permutation diagonals.

    C0 is the plain commutator operator plus the correction series' constant
    term (the corrected Hamiltonian anchors the correction on the operator it
    corrects; at T=0 the family is three times the plain commutator).
    Strings sharing an X-mask form one permutation diagonal of the matrix, so
    the operator at any T is held as per-mask column-amplitude vectors that
    are degree-2 polynomials in T. The eq8 normalization factor is
    sqrt(n / q(T)) with q the precomputed quartic sum of squared
    coefficients of the full family."""

    def __init__(self, g: Graph, order: int):
        if order not in (1, 2):
            raise ValueError("SeriesEvolver is for orders 1 and 2")
        s0, s1, s2 = pl.hqz_series_components(g)
        s0 = pl.build_h1(g) + s0
        if order < 2:
            s2 = pl.PauliSum(g.n)
        self.n = g.n
        dim = 1 << g.n
        cols = np.arange(dim, dtype=np.int64)
        union: dict[pl.PauliString, list[float]] = {}
        for k, comp in enumerate((s0, s1, s2)):
            for p, c in comp.terms():
                union.setdefault(p, [0.0, 0.0, 0.0])[k] = c
        coeff_rows = np.array(
            [union[p] for p in sorted(union, key=lambda s: s.word)]
        )
        # quartic q(T) = sum_s (c0 + c1 T + c2 T^2)^2, stored by power of T
        c0, c1, c2 = coeff_rows[:, 0], coeff_rows[:, 1], coeff_rows[:, 2]
        self.quartic = np.array(
            [
                float(c0 @ c0),
                2.0 * float(c0 @ c1),
                float(c1 @ c1) + 2.0 * float(c0 @ c2),
                2.0 * float(c1 @ c2),
                float(c2 @ c2),
            ]
        )
        masks: dict[int, list[tuple[pl.PauliString, list[float]]]] = {}
        for p in sorted(union, key=lambda s: s.word):
            masks.setdefault(p.x, []).append((p, union[p]))
        self._groups = []
        for x in sorted(masks):
            vecs = np.zeros((3, dim), dtype=complex)
            for p, cs in masks[x]:
                amps = pl._column_amplitudes(p, cols)
                for k in range(3):
                    if cs[k] != 0.0:
                        vecs[k] += cs[k] * amps
            self._groups.append((cols ^ x, vecs))

    def norm_factor(self, t_construct: float) -> float:
        q = float(np.polyval(self.quartic[::-1], t_construct))
        if q <= 0.0:
            raise pl.NormalizationError("series operator is zero at this T")
        return math.sqrt(self.n / q)

    def matvec_at(self, t_construct: float, scale: float = 1.0):
        pairs = []
        for idx, vecs in self._groups:
            v = scale * (
                vecs[0] + t_construct * vecs[1] + (t_construct * t_construct) * vecs[2]
            )
            pairs.append((idx, v))

        def matvec(psi: np.ndarray) -> np.ndarray:
            out = np.zeros_like(psi)
            for idx, v in pairs:
                out[idx] += v * psi
            return out

        return matvec


def series_state(
    evolver: SeriesEvolver,
    t_construct: float,
    tol: float,
    normalize: bool,
) -> np.ndarray:
    """Plus state evolved for duration T under the series operator built at T."""
    psi = plus_state(evolver.n).amplitudes
    if t_construct == 0.0:
        return psi
    scale = evolver.norm_factor(t_construct) if normalize else 1.0
    return _expmv(evolver.matvec_at(t_construct, scale), psi, t_construct, tol)


def series_sweep(
    g: Graph,
    order: int,
    grid: tuple[float, float, int],
    normalize: bool,
    tol: float = DEFAULT_TOL,
) -> list[tuple[float, Metrics]]:
    """Metrics over the construction-time grid (order 1 or 2).

    Unlike constant-Hamiltonian sweeps this cannot evolve incrementally (the
    operator changes with T), so every grid point is an independent
    evolution at full tolerance."""
    spec = diagonal_spectrum(g)
    evolver = SeriesEvolver(g, order)
    lo, hi, divisions = grid
    out = []
    for t in np.linspace(lo, hi, divisions + 1):
        psi = series_state(evolver, float(t), tol, normalize)
        out.append((float(t), measure_amplitudes(psi, spec)))
    return out


def measure_amplitudes(amplitudes: np.ndarray, spec) -> Metrics:
    return measure(StateVector(spec.n, amplitudes), spec)


# -- method dispatch -----------------------------------------------------------


def _blank_row(cfg: ExperimentConfig, ident: str) -> dict:
    lo, hi, div = cfg.grid
    return {
        "instance_id": ident,
        "method": cfg.method,
        "order": "" if cfg.order is None else str(cfg.order),
        "normalized": "true" if cfg.normalize == "eq8" else "false",
        "objective": cfg.objective,
        "t_star": "",
        "ratio": "",
        "pgs": "",
        "sigma": "",
        "grid_lo": repr(float(lo)),
        "grid_hi": repr(float(hi)),
        "divisions": str(div),
        "wall_time_ms": "",
        "params_gammas": "",
        "params_betas": "",
        "status": "ok",
        "error": "",
        "config_hash": cfg.config_hash(),
        "version": __version__,
    }


def _fill_metrics(row: dict, t_star: float, m: Metrics) -> None:
    row["t_star"] = repr(float(t_star))
    row["ratio"] = repr(float(m.ratio))
    row["pgs"] = repr(float(m.pgs))
    row["sigma"] = "" if m.sigma is None else repr(float(m.sigma))


def _pick_best(
    sweep: list[tuple[float, Metrics]],
    objective: str,
    refine=None,
    refine_tol: float = 1e-6,
) -> tuple[float, Metrics]:
    """Grid argmax (ties toward smaller t), optionally golden-refined.

    refine, when given, maps t -> Metrics with fresh evolutions."""
    values = [
        m.ratio if objective == "ratio" else m.pgs for _, m in sweep
    ]
    best = int(np.argmax(values))
    t_star, m_star = sweep[best]
    if refine is not None:
        cache: dict[float, Metrics] = {}

        def f(t: float) -> float:
            if t not in cache:
                cache[t] = refine(t)
            m = cache[t]
            return m.ratio if objective == "ratio" else m.pgs

        a = sweep[max(best - 1, 0)][0]
        b = sweep[min(best + 1, len(sweep) - 1)][0]
        t_ref, val_ref = golden_section_max(f, a, b, refine_tol)
        if val_ref > values[best]:
            return float(t_ref), cache[t_ref]
    return float(t_star), m_star


def _solve_h1_like(cfg: ExperimentConfig, g: Graph, h: pl.PauliSum, row: dict) -> None:
    spec = diagonal_spectrum(g)
    if cfg.normalize == "eq8":
        h = pl.normalize_energy(h, g.n)
    lo, hi, div = cfg.grid
    rep = optimize_time(
        h,
        spec,
        (lo, hi),
        div,
        objective=cfg.objective,
        tol=cfg.tol,
        grid_only=cfg.grid_only,
    )
    _fill_metrics(row, rep.t_star, rep.metrics_at_t_star)


def _solve_instance(cfg: ExperimentConfig, rec: dict) -> tuple[dict, tuple | None]:
    """One results row (and optionally an extra JSON artifact to write)."""
    row = _blank_row(cfg, rec["id"])
    start = time.perf_counter()
    extra = None
    try:
        g = record_to_graph(rec)
        if cfg.method == "h1":
            _solve_h1_like(cfg, g, pl.build_h1(g), row)
        elif cfg.method == "ring-analytic":
            if rec.get("kind") not in (None, "ring", "subgraph"):
                raise InvalidInstanceError(
                    "ring-analytic method needs ring instances"
                )
            lo, hi, div = cfg.grid
            rep = ring_optimize(
                g.n, (lo, hi), div, objective=cfg.objective, grid_only=cfg.grid_only
            )
            _fill_metrics(row, rep.t_star, rep.metrics_at_t_star)
        elif cfg.method == "qz":
            if cfg.order == 0:
                # Order zero is a constant multiple of the plain commutator
                # operator; under energy normalization the multiple divides
                # out, so normalized runs reuse the base construction and
                # agree with method "h1" bit for bit. Raw runs keep the
                # anchored scale (commutator plus series constant term).
                if cfg.normalize == "eq8":
                    _solve_h1_like(cfg, g, pl.build_h1(g), row)
                else:
                    _solve_h1_like(
                        cfg, g, pl.build_h1(g) + pl.build_hqz_series(g, 0.0, 0), row
                    )
            elif cfg.order in (1, 2):
                sweep = series_sweep(
                    g, cfg.order, cfg.grid, cfg.normalize == "eq8", cfg.tol
                )
                refine = None
                if not cfg.grid_only:
                    spec = diagonal_spectrum(g)
                    evolver = SeriesEvolver(g, cfg.order)

                    def refine(t, _spec=spec, _ev=evolver):
                        psi = series_state(_ev, t, cfg.tol, cfg.normalize == "eq8")
                        return measure_amplitudes(psi, _spec)

                t_star, m = _pick_best(sweep, cfg.objective, refine)
                _fill_metrics(row, t_star, m)
            else:  # "exp": conjugated-exponential variant, diagnostic scale
                if g.n > QZ_EXP_CAP:
                    raise ResourceLimitError(
                        f"qz order=exp capped at {QZ_EXP_CAP} qubits"
                    )
                spec = diagonal_spectrum(g)
                lo, hi, div = cfg.grid

                def at(t: float) -> Metrics:
                    psi = evolve_qz_exp_corrected(
                        g,
                        t,
                        plus_state(g.n),
                        cfg.tol,
                        normalize=cfg.normalize == "eq8",
                    )
                    return measure(psi, spec)

                sweep = [(float(t), at(float(t))) for t in np.linspace(lo, hi, div + 1)]
                t_star, m = _pick_best(
                    sweep, cfg.objective, None if cfg.grid_only else at
                )
                _fill_metrics(row, t_star, m)
        elif cfg.method == "qaoa":
            spec = diagonal_spectrum(g)
            rep = qaoa_optimize(
                g, spec, p=cfg.p, refine=not cfg.grid_only,
                normalize=cfg.normalize == "eq8",
            )
            row["method"] = f"qaoa-p{cfg.p}"
            row["grid_lo"] = repr(0.0)
            row["grid_hi"] = repr(2.0 * math.pi)
            row["divisions"] = str(rep.grid_divisions)
            row["params_gammas"] = ";".join(repr(v) for v in rep.gammas)
            row["params_betas"] = ";".join(repr(v) for v in rep.betas)
            _fill_metrics(row, rep.time, rep.metrics)
        elif cfg.method == "lpa":
            spec = diagonal_spectrum(g)
            rep = lpa_metrics(spec, cfg.fname)
            row["method"] = f"lpa-{cfg.fname}"
            m = Metrics(
                energy_expectation=rep.energy_at_omega,
                ratio=rep.ratio_at_omega,
                pgs=rep.pgs_at_omega,
                sigma=None,
            )
            _fill_metrics(row, rep.t_omega, m)
            extra = ("json", f"lpa-{rec['id']}.json", dataclasses.asdict(rep))
        else:  # pragma: no cover - validate() blocks this
            raise ConfigError(f"unhandled method {cfg.method!r}")
    except Exception as exc:  # isolate per-instance failures
        row["status"] = "error"
        row["error"] = f"{type(exc).__name__}: {exc}"
        for key in ("t_star", "ratio", "pgs", "sigma"):
            row[key] = ""
    row["wall_time_ms"] = repr(round((time.perf_counter() - start) * 1000.0, 3))
    return row, extra


def _worker(payload: tuple[dict, dict]) -> tuple[dict, tuple | None]:
    cfg_raw, rec = payload
    return _solve_instance(ExperimentConfig.from_dict(cfg_raw), rec)


def _config_for_pickle(cfg: ExperimentConfig) -> dict:
    raw = dataclasses.asdict(cfg)
    raw["grid"] = list(cfg.grid)
    raw["sizes"] = list(cfg.sizes)
    raw["seeds"] = list(cfg.seeds)
    return raw


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("COMMUTOPT_WORKERS", "1")))
    except ValueError:
        return 1


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    """All result rows for a campaign (deterministic given the config).

    Writes results.csv (plus per-instance JSON artifacts) under cfg.out when
    set. Failures become error rows; callers decide the exit code."""
    cfg.validate()
    records = resolve_instances(cfg)
    workers = worker_count()
    if workers > 1 and len(records) > 1:
        raw = _config_for_pickle(cfg)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(_worker, [(raw, rec) for rec in records]))
    else:
        solved = [_solve_instance(cfg, rec) for rec in records]
    rows = [row for row, _ in solved]
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for _, extra in solved:
            if extra is not None and extra[0] == "json":
                _atomic_write(out_dir / extra[1], json.dumps(extra[2], indent=2))
        write_rows(out_dir / "results.csv", RESULT_COLUMNS, rows)
    return rows


# -- single-instance time series ----------------------------------------------


def run_sweep(cfg: ExperimentConfig) -> list[dict]:
    """Per-time rows for the first (usually only) instance of the config."""
    cfg.validate()
    records = resolve_instances(cfg)
    if len(records) != 1:
        raise ConfigError(f"sweep expects exactly one instance, got {len(records)}")
    rec = records[0]
    g = record_to_graph(rec)
    lo, hi, div = cfg.grid
    normalized = cfg.normalize == "eq8"
    method = cfg.method
    if method == "ring-analytic":
        ts = np.linspace(lo, hi, div + 1)
        energy, pgs = ring_energy_and_pgs(g.n, ts)
        e_min = ring_ground_energy(g.n)
        series = [
            (float(t), Metrics(float(e), float(e) / e_min, float(p), None))
            for t, e, p in zip(ts, energy, pgs)
        ]
    elif method == "h1" or (method == "qz" and cfg.order == 0):
        # Normalized order-0 runs reuse the plain commutator (the constant
        # multiple divides out, keeping them bitwise equal to method "h1").
        if method == "h1" or normalized:
            h = pl.build_h1(g)
        else:
            h = pl.build_h1(g) + pl.build_hqz_series(g, 0.0, 0)
        if normalized:
            h = pl.normalize_energy(h, g.n)
        series = time_sweep(h, diagonal_spectrum(g), (lo, hi, div + 1), cfg.tol)
    elif method == "qz" and cfg.order in (1, 2):
        series = series_sweep(g, cfg.order, cfg.grid, normalized, cfg.tol)
    elif method == "qz" and cfg.order == "exp":
        if g.n > QZ_EXP_CAP:
            raise ConfigError(f"qz order=exp capped at {QZ_EXP_CAP} qubits")
        spec = diagonal_spectrum(g)
        series = [
            (
                float(t),
                measure(
                    evolve_qz_exp_corrected(
                        g, float(t), plus_state(g.n), cfg.tol, normalize=normalized
                    ),
                    spec,
                ),
            )
            for t in np.linspace(lo, hi, div + 1)
        ]
    else:
        raise ConfigError(f"sweep does not support method {method!r}")
    rows = []
    for t, m in series:
        rows.append(
            {
                "instance_id": rec["id"],
                "method": method if method != "qaoa" else f"qaoa-p{cfg.p}",
                "order": "" if cfg.order is None else str(cfg.order),
                "normalized": "true" if normalized else "false",
                "t": repr(float(t)),
                "energy": repr(float(m.energy_expectation)),
                "ratio": repr(float(m.ratio)),
                "pgs": repr(float(m.pgs)),
                "sigma": "" if m.sigma is None else repr(float(m.sigma)),
            }
        )
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        tag = method if cfg.order is None else f"{method}{cfg.order}"
        write_rows(out_dir / f"sweep-{rec['id']}-{tag}.csv", SWEEP_COLUMNS, rows)
    return rows


# -- paired comparison ---------------------------------------------------------


def run_compare(cfg: ExperimentConfig) -> tuple[list[dict], dict]:
    """H1 and depth-p circuit rows per instance under one normalization flag.

    Returns (rows, summary); summary reports the dominance fraction, the
    median H1 optimal time, and the mean circuit/H1 time ratio. With
    cfg.time_capped, each instance also gets an "h1-capped" row re-optimized
    on [grid_lo, circuit time] (duration-constrained comparison)."""
    cfg.validate()
    records = resolve_instances(cfg)
    h1_cfg = dataclasses.replace(cfg, method="h1")
    qaoa_cfg = dataclasses.replace(cfg, method="qaoa")
    tasks: list[tuple[dict, dict]] = []
    raw_h1, raw_qaoa = _config_for_pickle(h1_cfg), _config_for_pickle(qaoa_cfg)
    for rec in records:
        tasks.append((raw_h1, rec))
        tasks.append((raw_qaoa, rec))
    workers = worker_count()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(_worker, tasks))
    else:
        solved = [_worker(t) for t in tasks]
    rows = [row for row, _ in solved]
    if cfg.time_capped:
        for rec, qrow in zip(records, rows[1::2]):
            if qrow["status"] != "ok":
                continue
            cap = float(qrow["t_star"])
            lo = cfg.grid[0]
            if cap <= lo:
                continue
            capped_cfg = dataclasses.replace(
                h1_cfg, grid=(lo, cap, cfg.grid[2])
            )
            crow, _ = _solve_instance(capped_cfg, rec)
            crow["method"] = "h1-capped"
            rows.append(crow)
    summary = summarize_compare(rows)
    if cfg.out:
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_rows(out_dir / "compare.csv", RESULT_COLUMNS, rows)
        _atomic_write(out_dir / "summary.json", json.dumps(summary, indent=2))
    return rows, summary


def summarize_compare(rows: list[dict]) -> dict:
    """Dominance statistics from paired h1 / circuit rows."""
    by_instance: dict[str, dict[str, dict]] = {}
    for row in rows:
        if row["status"] != "ok":
            continue
        slot = "h1" if row["method"] == "h1" else (
            "qaoa" if row["method"].startswith("qaoa-") else None
        )
        if slot:
            by_instance.setdefault(row["instance_id"], {})[slot] = row
    pairs = {k: v for k, v in by_instance.items() if "h1" in v and "qaoa" in v}
    wins, time_ratios, tstars = 0, [], []
    for v in pairs.values():
        r_h1 = float(v["h1"]["ratio"])
        r_q = float(v["qaoa"]["ratio"])
        if r_h1 >= r_q - 1e-12:
            wins += 1
        t_h1 = float(v["h1"]["t_star"])
        tstars.append(t_h1)
        if t_h1 > 0:
            time_ratios.append(float(v["qaoa"]["t_star"]) / t_h1)
    n_pairs = len(pairs)
    return {
        "pairs": n_pairs,
        "h1_dominance_fraction": (wins / n_pairs) if n_pairs else float("nan"),
        "h1_t_star_median": float(np.median(tstars)) if tstars else float("nan"),
        "mean_time_ratio_qaoa_over_h1": (
            float(np.mean(time_ratios)) if time_ratios else float("nan")
        ),
        "errors": sum(1 for r in rows if r["status"] != "ok"),
    }


# -- locality bound runs ---------------------------------------------------------


def run_bound(
    t: float,
    quad_step: float = 1e-3,
    kind: str = "h1",
    subgraphs: tuple[str, ...] = BOUND_SUBGRAPHS,
    tol: float = DEFAULT_TOL,
) -> tuple[list[dict], float | None]:
    """Certified cut rows per subgraph, plus the worst-case bound when the
    three 3-regular neighborhoods are all present."""
    reports = {}
    rows = []
    for name in subgraphs:
        rep = lrb_cut_bound(get_subgraph(name), t, quad_step=quad_step, kind=kind, tol=tol)
        reports[name] = rep
        rows.append(
            {
                "subgraph": name,
                "t": repr(float(t)),
                "kind": kind,
                "local": repr(rep.local_estimate),
                "epsilon": repr(rep.epsilon),
                "upper": repr(rep.upper_estimate),
                "cut": repr(rep.cut_value),
            }
        )
    worst = None
    if set(BOUND_SUBGRAPHS) <= set(subgraphs):
        worst = worst_case_bound(reports)
        rows.append(
            {
                "subgraph": "worst-case",
                "t": repr(float(t)),
                "kind": kind,
                "local": "",
                "epsilon": "",
                "upper": "",
                "cut": repr(worst),
            }
        )
    return rows, worst


def run_bound_scan(
    interval: tuple[float, float] = (0.0, 0.2),
    divisions: int = 100,
    quad_step: float = 1e-3,
) -> tuple[list[dict], float, float]:
    """Long-format rows of the bound-vs-time scan plus (t_star, bound_star)."""
    scan = worst_case_over_time(interval, divisions, quad_step)
    rows = []
    for name, cuts in scan.cut_values.items():
        for t, c in zip(scan.times, cuts):
            rows.append(
                {
                    "subgraph": name,
                    "t": repr(float(t)),
                    "kind": "h1",
                    "local": "",
                    "epsilon": "",
                    "upper": "",
                    "cut": repr(float(c)),
                }
            )
    for t, b in zip(scan.times, scan.bounds):
        rows.append(
            {
                "subgraph": "worst-case",
                "t": repr(float(t)),
                "kind": "h1",
                "local": "",
                "epsilon": "",
                "upper": "",
                "cut": repr(float(b)),
            }
        )
    return rows, scan.t_star, scan.bound_star


# -- persistence -----------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_rows(path: str | Path, columns: list[str], rows: list[dict]) -> None:
    """CSV with a fixed header; atomic replace so readers never see partials."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in columns})
    os.replace(tmp, path)


def read_rows(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- plot-data recipes -------------------------------------------------------------


class RecipeError(ValueError):
    """Records do not cover what the recipe needs (message lists the gaps)."""


RECIPES = (
    "fig3-ring-saturation",
    "fig6-3reg-cuts",
    "fig9-qz-orders",
    "table1-lrb",
    "fig13-compare-qaoa",
)

_SIZE_RE = re.compile(r"-n(\d+)-s")


def _instance_size(ident: str) -> int:
    m = _SIZE_RE.search(ident)
    if not m:
        raise RecipeError(f"cannot parse size from instance id {ident!r}")
    return int(m.group(1))


def _ok(rows: list[dict]) -> list[dict]:
    return [r for r in rows if r.get("status", "ok") == "ok"]


def emit_plotdata(
    records: list[dict], figure: str, out_dir: str | Path
) -> Path:
    """Write one tidy CSV (x, y, group, extras) for the named figure recipe."""
    if figure not in RECIPES:
        raise RecipeError(f"unknown recipe {figure!r}; have {RECIPES}")
    if not records:
        raise RecipeError("no records supplied")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{figure}.csv"
    tidy: list[dict] = []
    columns = ["x", "y", "group"]

    if figure == "fig3-ring-saturation":
        rows = [
            r
            for r in _ok(records)
            if r.get("method") in ("ring-analytic", "h1")
        ]
        if not rows:
            raise RecipeError("need ring-analytic or h1 result rows")
        columns = ["x", "y", "group", "t_star"]
        sizes = []
        for r in sorted(rows, key=lambda r: _instance_size(r["instance_id"])):
            n = _instance_size(r["instance_id"])
            sizes.append(n)
            tidy.append(
                {
                    "x": n,
                    "y": r["ratio"],
                    "group": r["method"],
                    "t_star": r["t_star"],
                }
            )
        for depth in (1, 2, 3):
            const = depth / (depth + 1.0)
            for n in (min(sizes), max(sizes)):
                tidy.append(
                    {"x": n, "y": repr(const), "group": f"qaoa-p{depth}-constant",
                     "t_star": ""}
                )

    elif figure == "fig9-qz-orders":
        rows = [r for r in records if "t" in r and r.get("ratio")]
        if not rows:
            raise RecipeError("need sweep rows (t, ratio, order)")
        for r in rows:
            label = r.get("order") or r.get("method", "")
            tidy.append({"x": r["t"], "y": r["ratio"], "group": f"order-{label}"})

    elif figure == "fig6-3reg-cuts":
        rows = [r for r in records if "subgraph" in r and r.get("cut")]
        if not rows:
            raise RecipeError("need bound rows (subgraph, t, cut)")
        for r in rows:
            tidy.append({"x": r["t"], "y": r["cut"], "group": r["subgraph"]})

    elif figure == "table1-lrb":
        rows = {r["subgraph"]: r for r in records if "subgraph" in r}
        missing = [n for n in BOUND_SUBGRAPHS if n not in rows]
        if missing:
            raise RecipeError(f"missing bound rows for: {missing}")
        columns = ["subgraph", "local", "epsilon", "upper", "cut"]
        for name in BOUND_SUBGRAPHS + ("worst-case",):
            if name not in rows:
                continue
            r = rows[name]
            tidy.append(
                {
                    "subgraph": name,
                    "local": r["local"],
                    "epsilon": r["epsilon"],
                    "upper": r["upper"],
                    "cut": r["cut"],
                }
            )

    elif figure == "fig13-compare-qaoa":
        pairs: dict[str, dict[str, dict]] = {}
        for r in _ok(records):
            if r.get("method") == "h1":
                pairs.setdefault(r["instance_id"], {})["h1"] = r
            elif str(r.get("method", "")).startswith("qaoa-"):
                pairs.setdefault(r["instance_id"], {})["qaoa"] = r
        incomplete = [k for k, v in pairs.items() if len(v) != 2]
        if incomplete or not pairs:
            raise RecipeError(
                f"need h1+qaoa row pairs; incomplete for {sorted(incomplete)}"
            )
        columns = ["x", "y", "group", "t_h1", "t_qaoa"]
        for ident, v in sorted(pairs.items()):
            tidy.append(
                {
                    "x": v["qaoa"]["ratio"],
                    "y": v["h1"]["ratio"],
                    "group": ident,
                    "t_h1": v["h1"]["t_star"],
                    "t_qaoa": v["qaoa"]["t_star"],
                }
            )

    write_rows(out_path, columns, tidy)
    return out_path


# -- instance generation (gen subcommand) -----------------------------------------


def run_gen(cfg_raw: dict, out_dir: str | Path, seed_override: int | None = None) -> Path:
    """Generate an instance file from a generator spec config."""
    allowed = {"kind", "sizes", "seeds", "edge_prob", "count", "seed_base", "name"}
    unknown = set(cfg_raw) - allowed
    if unknown:
        raise ConfigError(f"unknown gen config keys: {sorted(unknown)}")
    kind = cfg_raw.get("kind")
    if kind is None:
        raise ConfigError("gen config needs a kind")
    sizes = [int(v) for v in cfg_raw.get("sizes", [])]
    if not sizes:
        raise ConfigError("gen config needs sizes")
    if "seeds" in cfg_raw:
        seeds = [int(v) for v in cfg_raw["seeds"]]
    else:
        base = int(cfg_raw.get("seed_base", 0))
        if seed_override is not None:
            base = seed_override
        seeds = list(range(base, base + int(cfg_raw.get("count", 1))))
    if not seeds:
        raise ConfigError("gen config needs seeds or a count")
    kwargs = {}
    if kind == "erdos" and "edge_prob" in cfg_raw:
        kwargs["edge_prob"] = float(cfg_raw["edge_prob"])
    records = []
    for n in sizes:
        for seed in seeds:
            try:
                g = generate(kind, n, seed, **kwargs)
            except InvalidInstanceError as exc:
                raise ConfigError(str(exc)) from None
            records.append(graph_to_record(g, kind, seed))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = cfg_raw.get("name", "instances.ndjson")
    path = out_dir / name
    _atomic_write(
        path, "".join(json.dumps(rec) + "\n" for rec in records)
    )
    return path
