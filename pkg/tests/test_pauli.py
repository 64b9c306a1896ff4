"""String algebra: products, commutators, constructions, normalization."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from commutopt import pauli as pl
from commutopt import (
    build_h1,
    build_hf,
    build_hi,
    build_hqz_series,
    commutator_over_2i,
    gen_erdos_renyi,
    gen_ring,
    gen_sk,
    normalize_energy,
    pauli_mul,
    trace_product,
)
from commutopt.pauli import PauliString, PauliSum

PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


def dense_of_word(word: str) -> np.ndarray:
    # word[i] acts on qubit i, and qubit 0 is the least-significant bit
    m = np.array([[1.0]], dtype=complex)
    for ch in word:
        m = np.kron(PAULI_MATS[ch], m)
    return m


def random_sum(rng, n, terms):
    d = {}
    for _ in range(terms):
        d[PauliString(n=n, x=int(rng.integers(1 << n)), z=int(rng.integers(1 << n)))] = float(
            rng.normal()
        )
    return PauliSum(n, d)


def test_multiplication_table_exhaustive():
    for a, b in itertools.product("IXYZ", repeat=2):
        phase, s = pauli_mul(PauliString.from_word(a), PauliString.from_word(b))
        expect = PAULI_MATS[a] @ PAULI_MATS[b]
        np.testing.assert_array_equal(phase * s.dense(), expect)


def test_two_qubit_products_match_kron():
    words = ["".join(w) for w in itertools.product("IXYZ", repeat=2)]
    for a, b in itertools.product(words[:8], words[8:]):
        phase, s = pauli_mul(PauliString.from_word(a), PauliString.from_word(b))
        np.testing.assert_allclose(
            phase * s.dense(), dense_of_word(a) @ dense_of_word(b), atol=1e-15
        )


def test_string_dense_matches_kron():
    for word in ("XY", "YZ", "ZZY", "IYX"):
        np.testing.assert_array_equal(
            PauliString.from_word(word).dense(), dense_of_word(word)
        )


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_commutator_antisymmetry_exact(seed):
    rng = np.random.default_rng(seed)
    a = random_sum(rng, 3, 4)
    b = random_sum(rng, 3, 4)
    residue = commutator_over_2i(a, b) + commutator_over_2i(b, a)
    assert residue.is_zero()


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=15, deadline=None)
def test_jacobi_identity(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_sum(rng, 3, 3) for _ in range(3))
    total = (
        commutator_over_2i(a, commutator_over_2i(b, c))
        + commutator_over_2i(b, commutator_over_2i(c, a))
        + commutator_over_2i(c, commutator_over_2i(a, b))
    )
    assert total.is_zero()


def test_commutator_coefficients_are_real_exactly():
    # phases are integer bookkeeping, so hermiticity is exact, not approximate
    rng = np.random.default_rng(7)
    for _ in range(5):
        h = commutator_over_2i(random_sum(rng, 4, 5), random_sum(rng, 4, 5))
        for _, c in h.terms():
            assert isinstance(c, float)


def test_dense_lowering_equivalence_small():
    rng = np.random.default_rng(3)
    for n in (2, 4, 6):
        a = random_sum(rng, n, 6)
        b = random_sum(rng, n, 6)
        da, db = a.dense(), b.dense()
        np.testing.assert_allclose((a + b).dense(), da + db, atol=1e-12)
        np.testing.assert_allclose((a - b).dense(), da - db, atol=1e-12)
        comm = commutator_over_2i(a, b).dense()
        np.testing.assert_allclose(comm, (da @ db - db @ da) / 2j, atol=1e-12)


def test_build_h1_matches_dense_commutator():
    for g in (gen_ring(4), gen_erdos_renyi(5, 0.6, 1), gen_sk(4, 2)):
        h1 = build_h1(g)
        hi, hf = build_hi(g.n).dense(), build_hf(g).dense()
        np.testing.assert_allclose(h1.dense(), (hi @ hf - hf @ hi) / 2j, atol=1e-12)


def test_h1_ring_term_structure():
    # each ring edge contributes its pair of Y-Z strings; all weight-2
    h1 = build_h1(gen_ring(6))
    assert h1.num_terms() == 12
    assert all(p.weight == 2 and "Y" in p.word for p, _ in h1.terms())


def test_trace_product_identities():
    x = PauliSum(1, {PauliString.from_word("X"): 1.0})
    assert trace_product(x, x) == 1.0
    z0z1 = PauliSum(2, {PauliString.from_word("ZI"): 1.0})
    z1z0 = PauliSum(2, {PauliString.from_word("IZ"): 1.0})
    assert trace_product(z0z1, z1z0) == 0.0
    for g in (gen_ring(5), gen_sk(4, 9)):
        assert trace_product(build_hi(g.n), build_h1(g)) == 0.0
        # cross-check against the dense trace
        a, b = build_hf(g), build_h1(g)
        dense = float(np.real(np.trace(a.dense() @ b.dense()))) / (1 << g.n)
        assert math.isclose(trace_product(a, b), dense, abs_tol=1e-12)


def test_normalize_energy_identity():
    for g in (gen_ring(6), gen_erdos_renyi(7, 0.5, 4), gen_sk(5, 0)):
        h = normalize_energy(build_h1(g), g.n)
        assert math.isclose(h.sum_sq_coeffs(), g.n, abs_tol=1e-12)
        again = normalize_energy(h, g.n)
        for (pa, ca), (pb, cb) in zip(h.terms(), again.terms()):
            assert pa == pb and math.isclose(ca, cb, abs_tol=1e-14)


def test_normalize_energy_zero_sum_raises():
    with pytest.raises(pl.NormalizationError):
        normalize_energy(PauliSum(3), 3)


def test_hqz_series_order0_is_twice_h1():
    for g in (gen_ring(4), gen_erdos_renyi(5, 0.6, 8)):
        s = build_hqz_series(g, 0.7, 0)
        twice = build_h1(g) * 2.0
        assert s == twice


def test_hqz_series_order2_at_zero_equals_order0():
    g = gen_ring(6)
    assert build_hqz_series(g, 0.0, 2) == build_hqz_series(g, 0.0, 0)


def test_hqz_series_order1_dense_oracle():
    # independent dense evaluation of the first-order corrected generator
    g = gen_ring(4)
    t = 0.1
    hi, hf = build_hi(4).dense(), build_hf(g).dense()
    h1 = (hi @ hf - hf @ hi) / 2j
    inner = hf + 1j * t * (h1 @ hf - hf @ h1)
    expect = -1j * (hi @ inner - inner @ hi)
    got = build_hqz_series(g, t, 1).dense()
    np.testing.assert_allclose(got, expect, atol=1e-12)


def test_hqz_series_order2_dense_oracle():
    g = gen_ring(4)
    t = 0.13
    hi, hf = build_hi(4).dense(), build_hf(g).dense()
    h1 = (hi @ hf - hf @ hi) / 2j
    comm = lambda a, b: a @ b - b @ a
    inner = hf + 1j * t * comm(h1, hf) - 0.5 * t * t * comm(h1, comm(h1, hf))
    expect = -1j * comm(hi, inner)
    got = build_hqz_series(g, t, 2).dense()
    np.testing.assert_allclose(got, expect, atol=1e-12)


def test_serialization_round_trip():
    # the text format carries five decimals, so exactly-representable
    # coefficients round-trip exactly; everything else to 1e-5
    h = PauliSum(
        3,
        {
            PauliString.from_word("XYZ"): 0.5,
            PauliString.from_word("ZIZ"): -1.25,
            PauliString.from_word("IYI"): 2.0,
        },
    )
    assert PauliSum.parse(h.serialize(), n=3) == h
    rng = np.random.default_rng(11)
    noisy = random_sum(rng, 3, 5)
    back = PauliSum.parse(noisy.serialize(), n=3)
    for (pa, ca), (pb, cb) in zip(sorted(noisy.terms()), sorted(back.terms())):
        assert pa == pb
        assert abs(ca - cb) <= 5e-6


def test_serialization_is_sorted_by_word():
    h = build_h1(gen_ring(5))
    words = [line.split()[1] for line in h.serialize().splitlines()]
    assert words == sorted(words)


def test_sparse_matches_dense():
    rng = np.random.default_rng(4)
    h = random_sum(rng, 5, 8)
    np.testing.assert_allclose(h.sparse().toarray(), h.dense(), atol=1e-14)


def test_apply_matches_dense_matvec():
    rng = np.random.default_rng(6)
    h = random_sum(rng, 5, 8)
    v = rng.normal(size=32) + 1j * rng.normal(size=32)
    np.testing.assert_allclose(h.apply(v), h.dense() @ v, atol=1e-12)
