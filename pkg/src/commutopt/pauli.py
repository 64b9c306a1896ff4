"""Exact algebra over real-coefficient sums of n-qubit Pauli strings.

A Pauli string is stored as two bitmasks (x, z) with the convention

    P(x, z) = i^{n_Y} X^x Z^z,      n_Y = popcount(x & z),

so each qubit carries I (00), X (10), Z (01) or Y (11) and the canonical
string is Hermitian. Products track the i-exponent as an exact integer mod 4
(never floating point), which makes commutators of Hermitian sums exactly
Hermitian: anticommuting Hermitian strings multiply to a +-i phase, and
[a, b]/2i therefore lands back on real coefficients with no rounding.

Coefficients below DROP_TOL after simplification are removed: nested
commutators cancel exactly and the cancellations must not survive as noise.
Terms iterate in lexicographic order of the letter word, so serialization
and test output are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np
import scipy.sparse as sp

from .instances import Graph

DROP_TOL = 1e-12

# Term-count cap for nested-commutator constructions (resource guard).
DEFAULT_TERM_CAP = 200_000

_LETTER_FROM_XZ = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_XZ_FROM_LETTER = {v: k for k, v in _LETTER_FROM_XZ.items()}

_PHASES = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)  # i**k for k mod 4


class DimensionMismatchError(ValueError):
    """Operands act on different qubit counts."""


class ZeroHamiltonianError(ValueError):
    """An operation that needs a nonzero operator received an empty sum."""


class NormalizationError(ValueError):
    """Energy normalization is undefined for the given operator."""


class TermBudgetError(RuntimeError):
    """A symbolic construction exceeded the configured term cap."""


@dataclass(frozen=True)
class PauliString:
    """Single n-qubit Pauli word, encoded by (x, z) bitmasks (bit k = qubit k)."""

    n: int
    x: int
    z: int

    @staticmethod
    def identity(n: int) -> "PauliString":
        return PauliString(n, 0, 0)

    @staticmethod
    def from_word(word: str) -> "PauliString":
        x = z = 0
        for k, letter in enumerate(word):
            try:
                xb, zb = _XZ_FROM_LETTER[letter]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {letter!r}") from None
            x |= xb << k
            z |= zb << k
        return PauliString(len(word), x, z)

    @staticmethod
    def from_ops(n: int, ops: dict[int, str]) -> "PauliString":
        """Build from {qubit index: letter}; unspecified qubits are I."""
        x = z = 0
        for k, letter in ops.items():
            if not 0 <= k < n:
                raise ValueError(f"qubit index {k} out of range for n={n}")
            xb, zb = _XZ_FROM_LETTER[letter]
            x |= xb << k
            z |= zb << k
        return PauliString(n, x, z)

    @property
    def word(self) -> str:
        return "".join(
            _LETTER_FROM_XZ[((self.x >> k) & 1, (self.z >> k) & 1)]
            for k in range(self.n)
        )

    @property
    def weight(self) -> int:
        return ((self.x | self.z)).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __lt__(self, other: "PauliString") -> bool:
        return self.word < other.word

    def __repr__(self) -> str:
        return f"PauliString({self.word!r})"

    def dense(self) -> np.ndarray:
        """2^n x 2^n complex matrix (small-n oracle helper)."""
        dim = 1 << self.n
        cols = np.arange(dim, dtype=np.int64)
        rows = cols ^ self.x
        amp = _column_amplitudes(self, cols)
        m = np.zeros((dim, dim), dtype=complex)
        m[rows, cols] = amp
        return m


def _column_amplitudes(p: PauliString, cols: np.ndarray) -> np.ndarray:
    """Amplitude of P|b> on |b ^ x> for each basis index b in `cols`."""
    n_y = (p.x & p.z).bit_count()
    signs = 1 - 2 * (
        np.bitwise_count(np.bitwise_and(cols, np.int64(p.z))).astype(np.int64) & 1
    )
    return _PHASES[n_y % 4] * signs


def mul_with_exponent(a: PauliString, b: PauliString) -> tuple[int, PauliString]:
    """Product a*b = i^k * c with k an exact integer mod 4."""
    if a.n != b.n:
        raise DimensionMismatchError(f"qubit counts differ: {a.n} != {b.n}")
    xc = a.x ^ b.x
    zc = a.z ^ b.z
    ya = (a.x & a.z).bit_count()
    yb = (b.x & b.z).bit_count()
    yc = (xc & zc).bit_count()
    k = (ya + yb + 2 * (a.z & b.x).bit_count() - yc) % 4
    return k, PauliString(a.n, xc, zc)


def pauli_mul(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product as (phase, string) with phase in {+1, -1, +i, -i}."""
    k, c = mul_with_exponent(a, b)
    return _PHASES[k], c


class PauliSum:
    """Immutable simplified real-coefficient sum of Pauli strings."""

    __slots__ = ("n", "_terms", "_cached_sparse")

    def __init__(self, n: int, terms: dict[PauliString, float] | None = None):
        self.n = n
        cleaned: dict[PauliString, float] = {}
        if terms:
            for p, c in terms.items():
                if p.n != n:
                    raise DimensionMismatchError(
                        f"term on {p.n} qubits in sum on {n}"
                    )
                if abs(c) > DROP_TOL:
                    cleaned[p] = float(c)
        object.__setattr__(self, "_terms", cleaned)
        object.__setattr__(self, "_cached_sparse", None)

    def __setattr__(self, name, value):
        if name in ("n", "_terms") and hasattr(self, "_terms"):
            raise AttributeError("PauliSum is immutable")
        object.__setattr__(self, name, value)

    # -- inspection ----------------------------------------------------

    def terms(self) -> Iterator[tuple[PauliString, float]]:
        """(string, coefficient) pairs in canonical lexicographic order."""
        for p in sorted(self._terms, key=lambda s: s.word):
            yield p, self._terms[p]

    def coeff(self, p: PauliString) -> float:
        return self._terms.get(p, 0.0)

    def num_terms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def sum_sq_coeffs(self) -> float:
        return float(sum(c * c for c in self._terms.values()))

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSum)
            and self.n == other.n
            and self._terms == other._terms
        )

    def __repr__(self) -> str:
        return f"PauliSum(n={self.n}, terms={self.num_terms()})"

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n != other.n:
            raise DimensionMismatchError("qubit counts differ")
        out = dict(self._terms)
        for p, c in other._terms.items():
            out[p] = out.get(p, 0.0) + c
        return PauliSum(self.n, out)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(self.n, {p: c * scalar for p, c in self._terms.items()})

    __rmul__ = __mul__

    # -- dense / sparse lowering ----------------------------------------

    def dense(self) -> np.ndarray:
        dim = 1 << self.n
        m = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim, dtype=np.int64)
        for p, c in self._terms.items():
            m[cols ^ p.x, cols] += c * _column_amplitudes(p, cols)
        return m

    def sparse(self) -> sp.csr_matrix:
        """CSR matrix; cached (the sum is immutable)."""
        cached = self._cached_sparse
        if cached is not None:
            return cached
        dim = 1 << self.n
        cols = np.arange(dim, dtype=np.int64)
        k = len(self._terms)
        if k == 0:
            mat = sp.csr_matrix((dim, dim), dtype=complex)
        else:
            rows = np.empty(k * dim, dtype=np.int64)
            ccols = np.empty(k * dim, dtype=np.int64)
            data = np.empty(k * dim, dtype=complex)
            for i, (p, c) in enumerate(self._terms.items()):
                rows[i * dim : (i + 1) * dim] = cols ^ p.x
                ccols[i * dim : (i + 1) * dim] = cols
                data[i * dim : (i + 1) * dim] = c * _column_amplitudes(p, cols)
            mat = sp.coo_matrix((data, (rows, ccols)), shape=(dim, dim)).tocsr()
        object.__setattr__(self, "_cached_sparse", mat)
        return mat

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.sparse().dot(psi)

    # -- serialization ---------------------------------------------------

    def serialize(self) -> str:
        """One term per line: signed coefficient, space, letter word."""
        lines = [f"{c:+.5f} {p.word}" for p, c in self.terms()]
        return "\n".join(lines)

    @staticmethod
    def parse(text: str, n: int | None = None) -> "PauliSum":
        terms: dict[PauliString, float] = {}
        for line in text.strip().splitlines():
            if not line.strip():
                continue
            coeff_str, word = line.split()
            p = PauliString.from_word(word)
            terms[p] = terms.get(p, 0.0) + float(coeff_str)
        if not terms and n is None:
            raise ValueError("cannot infer qubit count from empty text")
        size = n if n is not None else next(iter(terms)).n
        return PauliSum(size, terms)


# -- constructors ---------------------------------------------------------


def build_hf(g: Graph) -> PauliSum:
    """Diagonal cost operator: sum_ij w_ij Z_i Z_j + sum_i h_i Z_i."""
    terms: dict[PauliString, float] = {}
    for i, j, w in g.edges:
        p = PauliString.from_ops(g.n, {i: "Z", j: "Z"})
        terms[p] = terms.get(p, 0.0) + w
    for i, h in enumerate(g.biases):
        if h != 0.0:
            p = PauliString.from_ops(g.n, {i: "Z"})
            terms[p] = terms.get(p, 0.0) + h
    return PauliSum(g.n, terms)


def build_hi(n: int) -> PauliSum:
    """Driver -sum_k X_k; its ground state is the uniform superposition."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return PauliSum(
        n, {PauliString.from_ops(n, {k: "X"}): -1.0 for k in range(n)}
    )


def commutator_over_2i(a: PauliSum, b: PauliSum) -> PauliSum:
    """[a, b] / 2i, exactly real for Hermitian inputs.

    Anticommuting Hermitian strings multiply to i^k with k odd, so each
    surviving term contributes ca*cb*(+1 if k==1 else -1); commuting pairs
    cancel identically and never enter the output.
    """
    if a.n != b.n:
        raise DimensionMismatchError("qubit counts differ")
    out: dict[PauliString, float] = {}
    for pa, ca in a._terms.items():
        for pb, cb in b._terms.items():
            # strings commute iff the symplectic form is even
            if ((pa.z & pb.x).bit_count() + (pa.x & pb.z).bit_count()) % 2 == 0:
                continue
            k, pc = mul_with_exponent(pa, pb)
            out[pc] = out.get(pc, 0.0) + ca * cb * (1.0 if k == 1 else -1.0)
    return PauliSum(a.n, out)


def build_h1(g: Graph) -> PauliSum:
    """Velocity operator [build_hi, build_hf]/2i.

    Equals sum_ij w_ij (Y_i Z_j + Z_i Y_j) + sum_i h_i Y_i.
    """
    hf = build_hf(g)
    if hf.is_zero():
        raise ZeroHamiltonianError("graph has no edges and no biases")
    return commutator_over_2i(build_hi(g.n), hf)


def normalize_energy(h: PauliSum, n: int) -> PauliSum:
    """Scale so that (1/2^n) Tr(H^2) = n, i.e. sum of squared coefficients = n."""
    ssq = h.sum_sq_coeffs()
    if ssq <= 0.0:
        raise NormalizationError("cannot normalize a zero operator")
    return h * float(np.sqrt(n / ssq))


def trace_product(a: PauliSum, b: PauliSum) -> float:
    """(1/2^n) Tr(A B) = sum over shared strings of ca*cb (trace-orthogonality)."""
    if a.n != b.n:
        raise DimensionMismatchError("qubit counts differ")
    small, large = (a, b) if a.num_terms() <= b.num_terms() else (b, a)
    return float(
        sum(c * large._terms.get(p, 0.0) for p, c in small._terms.items())
    )


# -- corrected-series construction ----------------------------------------


def hqz_series_components(
    g: Graph, term_cap: int = DEFAULT_TERM_CAP
) -> tuple[PauliSum, PauliSum, PauliSum]:
    """Fixed operators (S0, S1, S2) of the corrected series S0 + T*S1 + T^2*S2.

    S0 = 2*[Hi, Hf]/2i = 2*H1; S1 and S2 are the first and second nested
    corrections. Computing them once lets a time sweep rebuild the operator
    at each grid value of T by coefficient arithmetic alone.
    """
    hi = build_hi(g.n)
    hf = build_hf(g)
    if hf.is_zero():
        raise ZeroHamiltonianError("graph has no edges and no biases")
    c1 = commutator_over_2i(hi, hf)               # = H1
    d1 = commutator_over_2i(c1, hf)               # [H1, Hf]/2i
    d2 = commutator_over_2i(c1, d1)               # [H1, [H1, Hf]/2i]/2i
    s0 = 2.0 * c1
    s1 = -4.0 * commutator_over_2i(hi, d1)
    s2 = 4.0 * commutator_over_2i(hi, d2)
    total = s0.num_terms() + s1.num_terms() + s2.num_terms()
    if total > term_cap:
        raise TermBudgetError(
            f"series construction produced {total} terms (cap {term_cap})"
        )
    return s0, s1, s2


def build_hqz_series(
    g: Graph, t_construct: float, order: int, term_cap: int = DEFAULT_TERM_CAP
) -> PauliSum:
    """Corrected Hamiltonian truncated at the given order in T = t_construct.

    Order 0 equals 2*build_h1(g) exactly; orders 1 and 2 add the nested
    corrections scaled by T and T^2.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2; got {order!r}")
    s0, s1, s2 = hqz_series_components(g, term_cap=term_cap)
    out = s0
    if order >= 1:
        out = out + t_construct * s1
    if order >= 2:
        out = out + (t_construct * t_construct) * s2
    return out


# -- generic dense lowering for test oracles -------------------------------


def sum_from_dense_letters(n: int, entries: Iterable[tuple[str, float]]) -> PauliSum:
    """Convenience: PauliSum from (word, coeff) pairs."""
    terms: dict[PauliString, float] = {}
    for word, c in entries:
        if len(word) != n:
            raise DimensionMismatchError("word length != n")
        p = PauliString.from_word(word)
        terms[p] = terms.get(p, 0.0) + c
    return PauliSum(n, terms)
