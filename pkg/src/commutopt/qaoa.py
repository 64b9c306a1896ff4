"""Layered alternating-operator circuits and their parameter optimization.

The circuit is |psi> = prod_{k=1..p} e^{-i beta_k Hi} e^{-i gamma_k Hf} |+>
with Hi = -sum_k X_k and Hf the diagonal cost operator. Layers are applied
exactly: a diagonal phase for the cost layer, and per-qubit rotations
e^{-i beta Hi} = prod_k (cos(beta) I + i sin(beta) X_k) for the driver layer.

Parameter search is a deterministic exhaustive grid over gamma in [0, 2pi)
and beta in [0, pi) — periodic boxes for integer-weight costs, plain search
boxes otherwise — organized as a tree over layers with the last layer
evaluated in a vectorized (gamma_p x beta_p) plane, followed by Nelder-Mead
polish started from the leading grid candidates. Among near-equal optima the
smallest total time sum_k (gamma_k + beta_k) wins, matching how circuit
duration is compared against continuous-evolution protocols elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .dynamics import Metrics, StateVector, hf_diagonal, measure, plus_state
from .instances import DiagonalSpectrum, Graph

_DEFAULT_AXIS = {1: 60, 2: 12, 3: 8}
_TIE_TOL = 1e-9


def _axis_default(p: int) -> int:
    return _DEFAULT_AXIS.get(p, max(4, int(round(60 ** (1.0 / p)))))


def _apply_driver(amp: np.ndarray, n: int, beta: float) -> np.ndarray:
    """e^{-i beta Hi} on a (dim, m) batch of state columns."""
    c = math.cos(beta)
    s = 1j * math.sin(beta)
    m = amp.shape[1]
    for k in range(n):
        flipped = amp.reshape(-1, 2, (1 << k) * m)[:, ::-1, :].reshape(amp.shape)
        amp = c * amp + s * flipped
    return amp


def qaoa_state(
    g: Graph,
    gammas: tuple[float, ...],
    betas: tuple[float, ...],
    phase_scale: float = 1.0,
) -> StateVector:
    """Exact circuit state for the given layer parameters.

    phase_scale multiplies the cost energies inside the phase layers (used
    when the cost operator is energy-rescaled for fair time comparisons);
    it does not affect which states the circuit can reach, only the time
    units of gamma.
    """
    if len(gammas) != len(betas) or not gammas:
        raise ValueError("need equal, nonzero numbers of gamma and beta values")
    energies = hf_diagonal(g) * phase_scale
    amp = plus_state(g.n).amplitudes[:, None]
    for gamma, beta in zip(gammas, betas):
        amp = np.exp(-1j * gamma * energies)[:, None] * amp
        amp = _apply_driver(amp, g.n, beta)
    return StateVector(g.n, amp[:, 0])


@dataclass
class QAOAReport:
    """Optimized circuit for one instance."""

    p: int
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    metrics: Metrics
    time: float  # sum of all layer parameters
    grid_divisions: int
    refined: bool
    normalized: bool
    degenerate_landscape: bool  # >1% of grid points tie with the optimum


@dataclass
class _SearchResult:
    params: np.ndarray
    value: float
    degenerate: bool


def _expectations(measure_diag: np.ndarray, amp: np.ndarray) -> np.ndarray:
    return measure_diag @ (amp.real**2 + amp.imag**2)


def _evaluate_params(
    x: np.ndarray, energies: np.ndarray, measure_diag: np.ndarray, n: int
) -> float:
    amp = np.full((energies.size, 1), 1.0 / math.sqrt(energies.size), dtype=complex)
    for k in range(x.size // 2):
        amp = np.exp(-1j * x[2 * k] * energies)[:, None] * amp
        amp = _apply_driver(amp, n, x[2 * k + 1])
    return float(_expectations(measure_diag, amp)[0])


def _grid_search(
    energies: np.ndarray,
    measure_diag: np.ndarray,
    n: int,
    p: int,
    axis: int,
    n_starts: int = 5,
) -> tuple[_SearchResult, list[np.ndarray]]:
    """Exhaustive grid minimization of <measure_diag>.

    Returns the tie-broken grid optimum plus up to n_starts distinct leading
    parameter vectors to seed local polish. The last layer is evaluated as a
    full (gamma, beta) plane per prefix, which keeps the exhaustive scan
    vectorized."""
    gammas = np.linspace(0.0, 2.0 * math.pi, axis, endpoint=False)
    betas = np.linspace(0.0, math.pi, axis, endpoint=False)
    dim = energies.size
    phase_plane = np.exp(-1j * np.outer(energies, gammas))  # (dim, axis)
    champions: list[tuple[float, float, np.ndarray]] = []  # value, time, params
    tie_counts = [0]
    best_seen = [math.inf]

    def handle_plane(prefix_amp: np.ndarray, prefix: tuple[float, ...]) -> None:
        block = phase_plane * prefix_amp[:, None]  # (dim, axis) gamma columns
        values = np.empty((axis, axis))  # [gamma, beta]
        for bi, beta in enumerate(betas):
            values[:, bi] = _expectations(measure_diag, _apply_driver(block.copy(), n, beta))
        vmin = float(values.min())
        best_seen[0] = min(best_seen[0], vmin)
        window = _TIE_TOL * max(1.0, abs(best_seen[0]))
        tie_counts[0] += int(np.count_nonzero(values <= best_seen[0] + window))
        gi_all, bi_all = np.nonzero(values <= vmin + window)
        times = gammas[gi_all] + betas[bi_all] + sum(prefix)
        pick = int(np.argmin(times))
        params = np.array(prefix + (gammas[gi_all[pick]], betas[bi_all[pick]]))
        champions.append((vmin, float(times[pick]), params))

    def recurse(amp: np.ndarray, prefix: tuple[float, ...], level: int) -> None:
        if level == p - 1:
            handle_plane(amp, prefix)
            return
        for gamma in gammas:
            shifted = np.exp(-1j * gamma * energies) * amp
            for beta in betas:
                nxt = _apply_driver(shifted[:, None], n, beta)[:, 0]
                recurse(nxt, prefix + (float(gamma), float(beta)), level + 1)

    recurse(np.full(dim, 1.0 / math.sqrt(dim), dtype=complex), (), 0)

    best_value = min(c[0] for c in champions)
    window = _TIE_TOL * max(1.0, abs(best_value))
    tied = [c for c in champions if c[0] <= best_value + window]
    tied.sort(key=lambda c: (c[1], c[0]))
    winner = tied[0]
    champions.sort(key=lambda c: (c[0], c[1]))
    starts = [winner[2]]
    for _, _, params in champions:
        if len(starts) >= n_starts:
            break
        if all(np.any(np.abs(params - s) > 1e-12) for s in starts):
            starts.append(params)
    degenerate = tie_counts[0] > max(10, (axis * axis) ** p // 100)
    return (
        _SearchResult(params=winner[2], value=winner[0], degenerate=degenerate),
        starts,
    )


def _ramp_starts(p: int) -> list[np.ndarray]:
    """Linear-ramp seeds (gamma rising, beta falling) for multilayer polish.

    Deep-circuit optima tend to lie near annealing-like schedules, which a
    coarse exhaustive grid misses at p >= 3; seeding the local polish with a
    few ramp scales recovers them deterministically."""
    if p < 2:
        return []
    xk = (np.arange(p) + 0.5) / p
    scales = (math.pi / 8, math.pi / 4, 3 * math.pi / 8)
    starts = []
    for sg in scales:
        for sb in scales:
            x0 = np.empty(2 * p)
            x0[0::2] = 2.0 * sg * xk
            x0[1::2] = 2.0 * sb * (1.0 - xk)
            starts.append(x0)
    return starts


def _polish(
    starts: list[np.ndarray],
    grid_best: _SearchResult,
    energies: np.ndarray,
    measure_diag: np.ndarray,
    n: int,
    p: int,
) -> tuple[np.ndarray, float, bool]:
    """Nelder-Mead from each start, clipped to the search box; the polished
    point replaces the grid optimum only when strictly better (ties keep the
    smaller total time)."""
    hi = np.array([2.0 * math.pi, math.pi] * p)

    def fun(x: np.ndarray) -> float:
        return _evaluate_params(np.clip(x, 0.0, hi), energies, measure_diag, n)

    best_params, best_value = grid_best.params, grid_best.value
    refined = False
    for x0 in starts:
        res = minimize(
            fun,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000, "maxfev": 8000},
        )
        x = np.clip(res.x, 0.0, hi)
        val = float(res.fun)
        window = _TIE_TOL * max(1.0, abs(min(val, best_value)))
        if val < best_value - window or (
            abs(val - best_value) <= window and x.sum() < best_params.sum() - 1e-12
        ):
            best_params, best_value, refined = x, val, True
    return best_params, best_value, refined


def _optimize_diag(
    energies: np.ndarray,
    measure_diag: np.ndarray,
    n: int,
    p: int,
    axis: int | None,
    refine: bool,
) -> tuple[np.ndarray, float, int, bool, bool]:
    if p < 1:
        raise ValueError("p must be >= 1")
    axis = _axis_default(p) if axis is None else int(axis)
    if axis < 2:
        raise ValueError("grid axis must have at least 2 points")
    grid_best, starts = _grid_search(energies, measure_diag, n, p, axis)
    params, value, refined = grid_best.params, grid_best.value, False
    if refine:
        params, value, refined = _polish(
            starts + _ramp_starts(p), grid_best, energies, measure_diag, n, p
        )
    return params, value, axis, refined, grid_best.degenerate


def qaoa_optimize(
    g: Graph,
    spec: DiagonalSpectrum,
    p: int = 1,
    grid_divisions: int | None = None,
    refine: bool = True,
    normalize: bool = False,
) -> QAOAReport:
    """Minimize the cost expectation of the p-layer circuit over parameters.

    With normalize=True the phase layers use the energy-rescaled cost
    operator (coefficient power matched to the qubit count), so the reported
    time shares units with rescaled continuous evolutions; ratios are
    unaffected because the rescaling only relabels gamma.
    """
    energies = hf_diagonal(g)
    scale = 1.0
    if normalize:
        ssq = sum(w * w for _, _, w in g.edges) + sum(h * h for h in g.biases)
        if ssq <= 0.0:
            raise ValueError("cost operator is zero")
        scale = math.sqrt(g.n / ssq)
    params, _, axis, refined, degenerate = _optimize_diag(
        energies * scale, energies, g.n, p, grid_divisions, refine
    )
    gammas = tuple(float(v) for v in params[0::2])
    betas = tuple(float(v) for v in params[1::2])
    psi = qaoa_state(g, gammas, betas, phase_scale=scale)
    return QAOAReport(
        p=p,
        gammas=gammas,
        betas=betas,
        metrics=measure(psi, spec),
        time=float(params.sum()),
        grid_divisions=axis,
        refined=refined,
        normalized=normalize,
        degenerate_landscape=degenerate,
    )


# -- translation-invariant (ring) evaluation through path subgraphs ----------


@dataclass
class SubgraphQAOAReport:
    """Per-edge circuit optimum evaluated on the causal path neighborhood."""

    p: int
    n: int
    ratio: float  # -min <Z Z> on the central edge = ring approximation ratio
    time: float
    gammas: tuple[float, ...]
    betas: tuple[float, ...]
    refined: bool


def _path_graph(n: int) -> Graph:
    return Graph(n=n, edges=tuple((i, i + 1, 1.0) for i in range(n - 1)))


def _edge_diag(n: int, i: int, j: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    si = 1.0 - 2.0 * ((idx >> i) & 1)
    sj = 1.0 - 2.0 * ((idx >> j) & 1)
    return si * sj


def ring_subgraph_qaoa(
    p: int, grid_divisions: int | None = None, refine: bool = True
) -> SubgraphQAOAReport:
    """Optimal p-layer edge expectation for arbitrarily large even rings.

    A depth-p circuit on a ring correlates each edge only with sites at
    distance <= p, so the central edge of a (2p+2)-site open path carries the
    exact per-edge expectation of any ring with more than 2p+2 sites. The
    per-edge optimum equals the ring approximation ratio because the even
    ring's ground energy is -1 per edge.
    """
    n = 2 * p + 2
    g = _path_graph(n)
    measure_diag = _edge_diag(n, p, p + 1)
    params, value, axis, refined, _ = _optimize_diag(
        hf_diagonal(g), measure_diag, n, p, grid_divisions, refine
    )
    return SubgraphQAOAReport(
        p=p,
        n=n,
        ratio=-value,
        time=float(params.sum()),
        gammas=tuple(float(v) for v in params[0::2]),
        betas=tuple(float(v) for v in params[1::2]),
        refined=refined,
    )
