"""State-vector evolution, observable measurement, and time optimization.

Evolution computes e^{-i H t} |psi> by a Hermitian Lanczos (Krylov) method:
a <=30-dimensional subspace is built with full reorthogonalization, the small
tridiagonal exponential is evaluated by dense eigensolve, and the step is
accepted only when an a-posteriori truncation estimate fits the caller's
error budget; otherwise the time step is halved (adaptive substepping). The
error contract is ||result - exact|| <= tol for the whole call; the norm is
preserved to ~1e-14 by construction (orthonormal basis, unitary small
exponential) and never renormalized, so drift is observable in tests.

Hamiltonians are PauliSum values (applied through their cached sparse form)
or, for the generalized and conjugated variants below, matvec closures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .instances import (
    DiagonalSpectrum,
    Graph,
    ResourceLimitError,
    DegenerateSpectrumError,
)
from . import pauli as pl

DEFAULT_TOL = 1e-10
SIMULATION_CAP = 24
KRYLOV_DIM = 30

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_INV_GOLDEN_SQ = (3.0 - math.sqrt(5.0)) / 2.0


class ConvergenceError(RuntimeError):
    """Krylov evolution failed to meet its error budget within the step cap."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass
class StateVector:
    """2^n complex amplitudes, unit norm."""

    n: int
    amplitudes: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class Metrics:
    """Observables of a state against a diagonal spectrum.

    ratio is energy_expectation / e_min (1 = ground state, 0 = uniform
    guessing on trace-free problems); sigma is the energy standard deviation
    over |e_min|, or None where the producing method does not define it.
    """

    energy_expectation: float
    ratio: float
    pgs: float
    sigma: float | None


@dataclass
class OptimumReport:
    """Result of a single-parameter time optimization."""

    t_star: float
    metrics_at_t_star: Metrics
    grid_lo: float
    grid_hi: float
    divisions: int
    objective: str = "ratio"
    constrained: bool = False


def plus_state(n: int, cap: int = SIMULATION_CAP) -> StateVector:
    """Uniform superposition, the ground state of build_hi(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise ResourceLimitError(f"n={n} exceeds simulation cap {cap}")
    dim = 1 << n
    amp = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
    return StateVector(n, amp)


# -- Krylov exponential action ---------------------------------------------


def _expmv(
    matvec: Callable[[np.ndarray], np.ndarray],
    psi: np.ndarray,
    t: float,
    tol: float,
    m_max: int = KRYLOV_DIM,
    max_substeps: int = 200_000,
) -> np.ndarray:
    """e^{-i t H} psi for Hermitian H given as a matvec closure."""
    if t == 0.0:
        return psi.copy()
    dim = psi.size
    total = abs(t)
    sign = 1.0 if t > 0 else -1.0
    current = psi.astype(complex, copy=True)
    remaining = total
    steps = 0
    while remaining > 0.0:
        steps += 1
        if steps > max_substeps:
            raise ConvergenceError(
                f"exceeded {max_substeps} substeps", residual=float("nan")
            )
        beta0 = np.linalg.norm(current)
        if beta0 == 0.0:
            return current
        m_cap = min(m_max, dim)
        q = np.empty((dim, m_cap), dtype=complex)
        alphas = np.empty(m_cap)
        betas = np.empty(m_cap)
        q[:, 0] = current / beta0
        m = 0
        breakdown = False
        for j in range(m_cap):
            w = matvec(q[:, j])
            a = float(np.real(np.vdot(q[:, j], w)))
            alphas[j] = a
            w = w - a * q[:, j]
            if j > 0:
                w = w - betas[j - 1] * q[:, j - 1]
            # full reorthogonalization (subspace is small, stability matters)
            w = w - q[:, : j + 1] @ (q[:, : j + 1].conj().T @ w)
            b = float(np.linalg.norm(w))
            betas[j] = b
            m = j + 1
            if b < 1e-13 * max(1.0, abs(a)):
                breakdown = True
                break
            if j + 1 < m_cap:
                q[:, j + 1] = w / b

        def small_exp(tau: float, k: int) -> np.ndarray:
            tm = np.diag(alphas[:k]).astype(complex)
            if k > 1:
                off = betas[: k - 1]
                tm += np.diag(off, 1) + np.diag(off, -1)
            evals, vecs = np.linalg.eigh(tm)
            phases = np.exp(-1j * sign * tau * evals)
            return vecs @ (phases * vecs[0, :].conj()) * beta0

        tau = remaining
        if breakdown:
            y = small_exp(tau, m)
            current = q[:, :m] @ y
            remaining = 0.0
            continue
        while True:
            y_full = small_exp(tau, m)
            if m > 2:
                y_trunc = small_exp(tau, m - 2)
                err = float(
                    np.linalg.norm(y_full[: m - 2] - y_trunc)
                    + np.linalg.norm(y_full[m - 2 :])
                )
            else:
                err = 0.0
            if err <= tol * (tau / total) or tau <= total * 1e-12:
                if err > tol * (tau / total):
                    raise ConvergenceError(
                        "Krylov step failed to converge", residual=err
                    )
                break
            tau /= 2.0
        current = q[:, :m] @ y_full
        remaining -= tau
    return current


def _matvec_for(h: pl.PauliSum) -> Callable[[np.ndarray], np.ndarray]:
    mat = h.sparse()
    return mat.dot


def evolve(
    h: pl.PauliSum, psi: StateVector, t: float, tol: float = DEFAULT_TOL
) -> StateVector:
    """e^{-i h t} psi via the Krylov engine; error <= tol, norm preserved."""
    if h.n != psi.n:
        raise pl.DimensionMismatchError("operator and state qubit counts differ")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if h.is_zero():
        return psi.copy()
    out = _expmv(_matvec_for(h), psi.amplitudes, t, tol)
    return StateVector(psi.n, out)


def _apply_flip_sum(psi: np.ndarray, n: int) -> np.ndarray:
    """-sum_k X_k applied to psi (the driver operator as a closure)."""
    out = np.zeros_like(psi)
    for k in range(n):
        view = psi.reshape(-1, 2, 1 << k)
        out -= view[:, ::-1, :].reshape(psi.shape)
    return out


def evolve_h1_general(
    fvals: np.ndarray, psi: StateVector, t: float, tol: float = DEFAULT_TOL
) -> StateVector:
    """Evolve under [Hi, diag(fvals)]/2i without expanding it symbolically.

    fvals is any real function of the diagonal cost energies (e.g. their
    cube), so this covers the generalized velocity construction for monotone
    transformations of the cost operator.
    """
    n = psi.n
    if fvals.size != psi.amplitudes.size:
        raise pl.DimensionMismatchError("fvals length != state dimension")

    def matvec(v: np.ndarray) -> np.ndarray:
        a = _apply_flip_sum(fvals * v, n)
        b = fvals * _apply_flip_sum(v, n)
        return -0.5j * (a - b)

    out = _expmv(matvec, psi.amplitudes, t, tol)
    return StateVector(n, out)


# -- conjugated-exponential corrected operator ------------------------------

_QZ_NORM_CACHE: dict[tuple[Graph, float], float] = {}


def _qz_exp_matvec(
    g: Graph, t_param: float, tol: float
) -> tuple[Callable[[np.ndarray], np.ndarray], int]:
    h1 = pl.build_h1(g)
    hi = pl.build_hi(g.n)
    energies = hf_diagonal(g)
    h1_mv = _matvec_for(h1)
    hi_mat = hi.sparse()

    def apply_a(v: np.ndarray) -> np.ndarray:
        w = _expmv(h1_mv, v, t_param, tol) if t_param != 0.0 else v
        w = energies * w
        return _expmv(h1_mv, w, -t_param, tol) if t_param != 0.0 else w

    def matvec(v: np.ndarray) -> np.ndarray:
        return -1j * (hi_mat.dot(apply_a(v)) - apply_a(hi_mat.dot(v)))

    return matvec, g.n


def hf_diagonal(g: Graph) -> np.ndarray:
    """Cost energies of all 2^n computational basis states (spin s=+1 <-> bit 0)."""
    dim = 1 << g.n
    idx = np.arange(dim, dtype=np.int64)
    energies = np.zeros(dim)
    for i, j, w in g.edges:
        si = 1.0 - 2.0 * ((idx >> i) & 1)
        sj = 1.0 - 2.0 * ((idx >> j) & 1)
        energies += w * si * sj
    for i, h in enumerate(g.biases):
        if h != 0.0:
            energies += h * (1.0 - 2.0 * ((idx >> i) & 1))
    return energies


def _column_frobenius(matvec, n: int) -> float:
    """(1/2^n) Tr(H^2) summed exactly over all basis columns of the closure."""
    dim = 1 << n
    acc = 0.0
    basis = np.zeros(dim, dtype=complex)
    for b in range(dim):
        basis[:] = 0.0
        basis[b] = 1.0
        col = matvec(basis)
        acc += float(np.real(np.vdot(col, col)))
    return acc / dim


def qz_exp_norm_factor(g: Graph, t_param: float, tol: float = 1e-11) -> float:
    """Scale factor lambda with (1/2^n) Tr[(lambda*H)^2] = n for the
    conjugated-exponential corrected operator.

    There is no closed form, so the trace is summed exactly over all 2^n
    basis columns through the matvec closure (no dense matrix is built).
    O(2^n) Krylov applications — cached per (graph, t_param); intended for
    diagnostic runs at small n.
    """
    key = (g, float(t_param))
    if key in _QZ_NORM_CACHE:
        return _QZ_NORM_CACHE[key]
    matvec, n = _qz_exp_matvec(g, t_param, tol)
    fro = _column_frobenius(matvec, n)
    if fro <= 0.0:
        raise pl.NormalizationError("corrected operator is zero")
    lam = math.sqrt(n / fro)
    _QZ_NORM_CACHE[key] = lam
    return lam


def evolve_qz_exp(
    g: Graph, t_param: float, psi: StateVector, tol: float = DEFAULT_TOL
) -> StateVector:
    """Evolve under the energy-normalized conjugated-exponential corrected
    operator for duration t_param (the construction time and the evolution
    duration are the same single parameter).

    The operator is applied compositionally — inner exponential actions of
    the velocity operator around the diagonal cost, commutated with the
    driver — so no dense matrix is materialized.
    """
    if g.n != psi.n:
        raise pl.DimensionMismatchError("graph and state qubit counts differ")
    inner_tol = min(tol, 1e-10) / 10.0
    lam = qz_exp_norm_factor(g, t_param, tol=inner_tol)
    matvec, _ = _qz_exp_matvec(g, t_param, inner_tol)

    def scaled(v: np.ndarray) -> np.ndarray:
        return lam * matvec(v)

    out = _expmv(scaled, psi.amplitudes, t_param, tol)
    return StateVector(psi.n, out)


_QZ_CORRECTED_NORM_CACHE: dict[tuple[Graph, float], float] = {}


def evolve_qz_exp_corrected(
    g: Graph,
    t_param: float,
    psi: StateVector,
    tol: float = DEFAULT_TOL,
    normalize: bool = False,
) -> StateVector:
    """Evolve under the commutator operator plus its full conjugated-
    exponential correction, for duration t_param (the construction time and
    the evolution duration are the same single parameter, matching the
    truncated-series runs).

    The default is the raw scale the series ordering experiments use; with
    normalize=True the combined operator is first rescaled to the standard
    energy norm via the same exact column trace as qz_exp_norm_factor
    (cached per graph and t_param, small-n diagnostic cost).
    """
    if g.n != psi.n:
        raise pl.DimensionMismatchError("graph and state qubit counts differ")
    inner_tol = min(tol, 1e-10) / 10.0
    qz_mv, n = _qz_exp_matvec(g, t_param, inner_tol)
    h1_mv = _matvec_for(pl.build_h1(g))

    def combined(v: np.ndarray) -> np.ndarray:
        return h1_mv(v) + qz_mv(v)

    op = combined
    if normalize:
        key = (g, float(t_param))
        lam = _QZ_CORRECTED_NORM_CACHE.get(key)
        if lam is None:
            fro = _column_frobenius(combined, n)
            if fro <= 0.0:
                raise pl.NormalizationError("corrected operator is zero")
            lam = math.sqrt(n / fro)
            _QZ_CORRECTED_NORM_CACHE[key] = lam

        def op(v: np.ndarray) -> np.ndarray:
            return lam * combined(v)

    out = _expmv(op, psi.amplitudes, t_param, tol)
    return StateVector(psi.n, out)


# -- measurement ------------------------------------------------------------


def measure(psi: StateVector, spec: DiagonalSpectrum) -> Metrics:
    """Energy expectation, approximation ratio, ground probability, sigma."""
    if spec.energies.size != psi.amplitudes.size:
        raise pl.DimensionMismatchError("state and spectrum sizes differ")
    if spec.e_min >= 0.0:
        raise DegenerateSpectrumError("ratio undefined for e_min >= 0")
    probs = np.abs(psi.amplitudes) ** 2
    e1 = float(probs @ spec.energies)
    e2 = float(probs @ (spec.energies * spec.energies))
    var = max(e2 - e1 * e1, 0.0)
    return Metrics(
        energy_expectation=e1,
        ratio=e1 / spec.e_min,
        pgs=float(probs[spec.ground_indices].sum()),
        sigma=math.sqrt(var) / abs(spec.e_min),
    )


# -- sweeps and optimization -------------------------------------------------


def time_sweep(
    h: pl.PauliSum,
    spec: DiagonalSpectrum,
    grid: tuple[float, float, int],
    tol: float = DEFAULT_TOL,
) -> list[tuple[float, Metrics]]:
    """Metrics at uniformly spaced times from the plus state.

    The state is carried forward incrementally (evolve t_k -> t_{k+1});
    the error budget tol is split across the steps so the whole sweep stays
    within tol of independent single-shot evolutions.
    """
    lo, hi, divisions = grid
    if divisions < 2:
        raise ValueError("divisions must be >= 2")
    if lo < 0 or hi < lo:
        raise ValueError("need 0 <= lo <= hi")
    ts = np.linspace(lo, hi, divisions)
    step_tol = tol / max(divisions, 1)
    psi = plus_state(h.n)
    out = []
    prev_t = 0.0
    for t in ts:
        dt = float(t) - prev_t
        if dt != 0.0:
            psi = evolve(h, psi, dt, step_tol)
            prev_t = float(t)
        out.append((float(t), measure(psi, spec)))
    return out


def _objective_value(m: Metrics, objective: str) -> float:
    if objective == "ratio":
        return m.ratio
    if objective == "pgs":
        return m.pgs
    raise ValueError(f"unknown objective {objective!r}")


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-6
) -> tuple[float, float]:
    """Golden-section maximization on [a, b]; returns (x, f(x)).

    On exact ties the shrinking rule keeps the left (smaller-x) subinterval,
    so plateau optima resolve toward smaller arguments.
    """
    dist = b - a
    if dist <= tol:
        x = (a + b) / 2.0
        return x, f(x)
    c = a + _INV_GOLDEN_SQ * dist
    d = a + _INV_GOLDEN * dist
    yc, yd = f(c), f(d)
    iterations = int(math.ceil(math.log(tol / dist) / math.log(_INV_GOLDEN)))
    for _ in range(max(iterations - 1, 0)):
        if yc >= yd:
            b, d, yd = d, c, yc
            dist *= _INV_GOLDEN
            c = a + _INV_GOLDEN_SQ * dist
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            dist *= _INV_GOLDEN
            d = a + _INV_GOLDEN * dist
            yd = f(d)
    if yc >= yd:
        return c, yc
    return d, yd


def optimize_time(
    h: pl.PauliSum,
    spec: DiagonalSpectrum,
    interval: tuple[float, float],
    divisions: int,
    objective: str = "ratio",
    tol: float = DEFAULT_TOL,
    grid_only: bool = False,
    refine_tol: float = 1e-6,
    constrained: bool = False,
) -> OptimumReport:
    """Grid scan (incremental sweep) then golden-section refinement.

    Ties on the grid break toward smaller t (first maximal entry); the
    refined point only replaces the grid optimum when it is strictly better.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if lo < 0 or hi <= lo:
        raise ValueError("need 0 <= lo < hi")
    if divisions < 2:
        raise ValueError("divisions must be >= 2")
    sweep = time_sweep(h, spec, (lo, hi, divisions + 1), tol)
    values = [_objective_value(m, objective) for _, m in sweep]
    best = int(np.argmax(values))
    t_star, best_metrics = sweep[best]
    best_val = values[best]
    if not grid_only:
        bracket_lo = sweep[max(best - 1, 0)][0]
        bracket_hi = sweep[min(best + 1, len(sweep) - 1)][0]
        cache: dict[float, Metrics] = {}

        def f(t: float) -> float:
            if t not in cache:
                psi = evolve(h, plus_state(h.n), t, tol)
                cache[t] = measure(psi, spec)
            return _objective_value(cache[t], objective)

        t_ref, val_ref = golden_section_max(f, bracket_lo, bracket_hi, refine_tol)
        if val_ref > best_val:
            t_star, best_val, best_metrics = t_ref, val_ref, cache[t_ref]
    return OptimumReport(
        t_star=float(t_star),
        metrics_at_t_star=best_metrics,
        grid_lo=lo,
        grid_hi=hi,
        divisions=divisions,
        objective=objective,
        constrained=constrained,
    )
