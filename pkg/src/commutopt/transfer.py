"""Exact state-transfer generators and the projector-ansatz closed forms.

Three constructions share a two-level geometry:

* hopt_from_states: the rank-2 antisymmetric generator
  H = -i(|psi_i><psi_f| - |psi_f><psi_i|) (final state phase-rotated so the
  overlap is real positive), which drives psi_i to psi_f in the least time
  allowed by the overlap: T = arccos(|<i|f>|) / sqrt(1 - |<i|f>|^2).

* single_qubit_optimal: the one-qubit specialization where the commutator of
  the Bloch-normalized endpoint Hamiltonians is itself the optimal generator
  and the transfer time is the Bloch angle over twice the commutator's
  energy spread on the initial ground state.

* lpa_*: evolution under H = -i [|+><+|, f(Hf)], which never leaves the
  plane spanned by the uniform state |+> and the f-weighted target
  |omega> ~ f(Hf)|+>, so amplitudes, arrival times, and arrival metrics all
  reduce to scalar trigonometry in the plane.

pauli_expand converts small dense Hermitian operators into the sparse string
representation (fast Walsh-Hadamard transform per X-mask), bridging the
dense constructions here to the string algebra used everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import pauli as pl
from .dynamics import StateVector
from .instances import DiagonalSpectrum, ResourceLimitError

HERMITICITY_TOL = 1e-10
OVERLAP_TOL = 1e-12
PAULI_EXPAND_CAP = 10


class HermiticityError(ValueError):
    """Operator is not Hermitian within tolerance."""


class OrthogonalStatesError(ValueError):
    """Transfer endpoints are orthogonal; the overlap geometry degenerates."""


class TrivialTransferError(ValueError):
    """Endpoint Hamiltonians are scalar or (anti)parallel; nothing to rotate."""


class DegenerateFunctionError(ValueError):
    """The spectral weight function is zero, constant, or non-finite."""


@dataclass(frozen=True)
class DenseOperator:
    """A dense Hermitian operator on n qubits (validated at construction)."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 1 << self.n
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (dim, dim):
            raise pl.DimensionMismatchError(
                f"expected shape {(dim, dim)}, got {m.shape}"
            )
        scale = max(1.0, float(np.abs(m).max()))
        if float(np.abs(m - m.conj().T).max()) > HERMITICITY_TOL * scale:
            raise HermiticityError("matrix is not Hermitian within tolerance")
        object.__setattr__(self, "matrix", m)

    def evolve(self, psi: np.ndarray, t: float) -> np.ndarray:
        """e^{-i H t} psi by dense eigendecomposition (operators here are small)."""
        evals, vecs = np.linalg.eigh(self.matrix)
        return vecs @ (np.exp(-1j * evals * t) * (vecs.conj().T @ psi))


def _check_state(psi: np.ndarray, name: str) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = float(np.linalg.norm(psi))
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"{name} is not normalized (norm {nrm})")
    return psi


def hopt_from_states(psi_i: np.ndarray, psi_f: np.ndarray) -> DenseOperator:
    """Rank-2 generator rotating psi_i onto psi_f along the geodesic."""
    a = _check_state(psi_i, "psi_i")
    b = _check_state(psi_f, "psi_f")
    if a.size != b.size:
        raise pl.DimensionMismatchError("state dimensions differ")
    ov = complex(np.vdot(a, b))
    if abs(ov) < OVERLAP_TOL:
        raise OrthogonalStatesError("orthogonal endpoints: rotation plane undefined")
    b = b * (ov.conjugate() / abs(ov))  # now <i|f> = |ov| > 0
    h = -1j * (np.outer(a, b.conj()) - np.outer(b, a.conj()))
    n = int(round(math.log2(a.size)))
    return DenseOperator(n=n, matrix=h)


def transfer_time(psi_i: np.ndarray, psi_f: np.ndarray) -> float:
    """Arrival time of hopt_from_states: arccos(v)/sqrt(1-v^2), v = |<i|f>|."""
    a = _check_state(psi_i, "psi_i")
    b = _check_state(psi_f, "psi_f")
    ov = abs(complex(np.vdot(a, b)))
    if ov < OVERLAP_TOL:
        raise OrthogonalStatesError("orthogonal endpoints: no finite transfer time")
    if ov >= 1.0 - 1e-15:
        return 0.0
    return math.acos(ov) / math.sqrt(1.0 - ov * ov)


def path_length(states: list[np.ndarray]) -> float:
    """Fubini-Study path length (Bloch convention: factor 2 per segment)."""
    total = 0.0
    for u, v in zip(states, states[1:]):
        ov = min(abs(complex(np.vdot(u, v))), 1.0)
        total += 2.0 * math.acos(ov)
    return total


# -- dense -> string-algebra bridge -------------------------------------------


def _fwht(vec: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform, natural (bitwise-parity) order."""
    out = vec.astype(complex).copy()
    size = out.size
    h = 1
    while h < size:
        out = out.reshape(-1, 2 * h)
        left = out[:, :h].copy()
        out[:, :h] += out[:, h:]
        out[:, h:] = left - out[:, h:]
        h *= 2
    return out.reshape(size)


def pauli_expand(
    op: DenseOperator | np.ndarray, n: int | None = None, drop_tol: float = 1e-12
) -> pl.PauliSum:
    """Expand a Hermitian matrix over Pauli strings: c_P = Tr(P A) / 2^n.

    For each X-mask the coefficients over all Z-masks are one Walsh-Hadamard
    transform of a diagonal gather, so the full expansion costs
    O(4^n log 2^n) instead of O(8^n)."""
    if isinstance(op, DenseOperator):
        matrix, n = op.matrix, op.n
    else:
        matrix = np.asarray(op, dtype=complex)
        if n is None:
            n = int(round(math.log2(matrix.shape[0])))
        DenseOperator(n=n, matrix=matrix)  # shape + hermiticity validation
    if n > PAULI_EXPAND_CAP:
        raise ResourceLimitError(f"pauli_expand capped at {PAULI_EXPAND_CAP} qubits")
    dim = 1 << n
    cols = np.arange(dim)
    zs = np.arange(dim, dtype=np.uint64)
    # (-i)^k for k letters that carry both an X and a Z bit: the gathered
    # diagonal contributes i^k through the string's internal phase, and the
    # coefficient must cancel it to stay real.
    phases = np.array([1.0, -1.0j, -1.0, 1.0j])
    terms: dict[pl.PauliString, float] = {}
    for x in range(dim):
        gathered = matrix[cols ^ x, cols]
        walsh = _fwht(gathered)
        coeffs = phases[np.bitwise_count(np.uint64(x) & zs) % 4] * walsh / dim
        keep = np.nonzero(np.abs(coeffs) > drop_tol)[0]
        for z in keep:
            c = coeffs[z]
            if abs(c.imag) > 1e-9 * max(1.0, abs(c)):
                raise HermiticityError("complex string coefficient from expansion")
            terms[pl.PauliString(n=n, x=x, z=int(z))] = float(c.real)
    return pl.PauliSum(n, terms)


# -- single-qubit endpoint geometry -------------------------------------------


@dataclass
class SingleQubitReport:
    """Optimal one-qubit transfer between the ground states of two endpoints."""

    velocity: pl.PauliSum  # commutator of the Bloch-normalized endpoints, over 2i
    cos_angle: float  # Bloch-space cosine between the endpoints
    delta_e: float  # energy spread of `velocity` on the initial ground state
    t_opt: float  # arccos(cos_angle) / (2 delta_e)


def _bloch_normalize(h: np.ndarray, name: str) -> np.ndarray:
    traceless = h - (np.trace(h) / 2.0) * np.eye(2)
    length = math.sqrt(max(float(np.real(np.trace(traceless @ traceless))) / 2.0, 0.0))
    if length < 1e-12:
        raise TrivialTransferError(f"{name} is a scalar: no ground-state direction")
    return traceless / length


def single_qubit_optimal(hi: np.ndarray, hf: np.ndarray) -> SingleQubitReport:
    """Transfer the ground state of hi to the ground state of hf optimally.

    Both endpoints are centered and Bloch-normalized; their commutator over
    2i generates the rotation, and the transfer time follows from the angle
    between the Bloch axes and the generator's spread on the start state."""
    hi = DenseOperator(n=1, matrix=np.asarray(hi, dtype=complex)).matrix
    hf = DenseOperator(n=1, matrix=np.asarray(hf, dtype=complex)).matrix
    ti = _bloch_normalize(hi, "hi")
    tf = _bloch_normalize(hf, "hf")
    cos_angle = float(np.clip(np.real(np.trace(ti @ tf)) / 2.0, -1.0, 1.0))
    if 1.0 - abs(cos_angle) < 1e-12:
        raise TrivialTransferError("endpoints are (anti)parallel: commutator vanishes")
    comm = (ti @ tf - tf @ ti) / 2.0j
    velocity = pauli_expand(comm, n=1)
    ground = np.linalg.eigh(hi)[1][:, 0]
    e1 = float(np.real(np.vdot(ground, comm @ ground)))
    e2 = float(np.real(np.vdot(ground, comm @ (comm @ ground))))
    delta_e = math.sqrt(max(e2 - e1 * e1, 0.0))
    if delta_e < 1e-14:
        raise TrivialTransferError("generator has no spread on the start state")
    return SingleQubitReport(
        velocity=velocity,
        cos_angle=cos_angle,
        delta_e=delta_e,
        t_opt=math.acos(cos_angle) / (2.0 * delta_e),
    )


# -- projector-ansatz closed forms --------------------------------------------


def apply_f(spec: DiagonalSpectrum, fspec: str) -> np.ndarray:
    """Spectral weight functions selectable by tag.

    "identity"           f(E) = E
    "power:m"            f(E) = E^m          (plain "power" means m = 3)
    "exp" / "exp:a"      f(E) = exp(-a E)    (a defaults to 1)
    "ground-projector"   f(E) = 1 on the ground manifold, else 0
    """
    e = spec.energies
    if fspec == "identity":
        out = e.astype(float).copy()
    elif fspec == "power" or fspec.startswith("power:"):
        m = int(fspec.split(":", 1)[1]) if ":" in fspec else 3
        if m < 1:
            raise ValueError("power exponent must be >= 1")
        out = e.astype(float) ** m
    elif fspec == "exp" or fspec.startswith("exp:"):
        alpha = float(fspec.split(":", 1)[1]) if ":" in fspec else 1.0
        out = np.exp(-alpha * e.astype(float))
    elif fspec == "ground-projector":
        out = (e == spec.e_min).astype(float)
    else:
        raise ValueError(f"unknown weight function {fspec!r}")
    if not np.all(np.isfinite(out)):
        raise DegenerateFunctionError(f"weight function {fspec!r} overflowed")
    return out


@dataclass
class LPAReport:
    """Plane geometry of the projector-ansatz evolution for one weight."""

    fname: str
    overlap: float  # <+|omega> after orienting omega toward |+>
    beta: float  # plane rotation rate
    t_omega: float  # arrival time at omega
    t_omega_perp: float  # arrival time at the orthogonal plane vector
    pgs_at_omega: float
    energy_at_omega: float
    ratio_at_omega: float


def _plane(spec: DiagonalSpectrum, fname: str) -> tuple[np.ndarray, float, float, float]:
    """Weight vector (oriented), overlap a, rotation rate beta, sum f^2."""
    fvals = apply_f(spec, fname)
    ssq = float(fvals @ fvals)
    if ssq <= 0.0:
        raise DegenerateFunctionError("weight function vanishes on the spectrum")
    dim = fvals.size
    r = math.sqrt(ssq / dim)
    a = float(fvals.sum() / dim) / r
    if a < 0.0:
        fvals = -fvals
        a = -a
    if 1.0 - a * a < 1e-24:
        raise DegenerateFunctionError(
            "weight function is constant: target equals the start state"
        )
    beta = r * math.sqrt(1.0 - a * a)
    return fvals, a, beta, ssq


def lpa_metrics(spec: DiagonalSpectrum, fname: str = "identity") -> LPAReport:
    fvals, a, beta, ssq = _plane(spec, fname)
    f_gs = float(fvals[spec.ground_indices[0]])
    return LPAReport(
        fname=fname,
        overlap=a,
        beta=beta,
        t_omega=math.acos(a) / beta,
        t_omega_perp=math.pi / (2.0 * beta),
        pgs_at_omega=spec.degeneracy * f_gs * f_gs / ssq,
        energy_at_omega=float(spec.energies @ (fvals * fvals)) / ssq,
        ratio_at_omega=(float(spec.energies @ (fvals * fvals)) / ssq) / spec.e_min,
    )


def lpa_evolve(spec: DiagonalSpectrum, fname: str, t: float) -> StateVector:
    """Closed-form state at time t: rotation in the (|+>, |omega-perp>) plane."""
    fvals, a, beta, ssq = _plane(spec, fname)
    dim = fvals.size
    omega = fvals / math.sqrt(ssq)
    plus = 1.0 / math.sqrt(dim)
    perp = (omega - a * plus) / math.sqrt(1.0 - a * a)
    amp = (math.cos(beta * t) * plus + math.sin(beta * t) * perp).astype(complex)
    return StateVector(spec.n, amp)


def lpa_operator_dense(spec: DiagonalSpectrum, fname: str = "identity") -> DenseOperator:
    """The generator -i [ |+><+| , f(Hf) ] materialized densely (oracle use)."""
    fvals, _, _, _ = _plane(spec, fname)
    dim = fvals.size
    h = -1j * (fvals[None, :] - fvals[:, None]) / dim
    return DenseOperator(n=spec.n, matrix=h)
