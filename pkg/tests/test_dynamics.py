"""Evolution engine, measurement, sweeps, and the time optimizer."""

import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from commutopt import (
    build_h1,
    build_hf,
    build_hi,
    diagonal_spectrum,
    evolve,
    evolve_h1_general,
    evolve_qz_exp,
    evolve_qz_exp_corrected,
    gen_erdos_renyi,
    gen_ring,
    gen_sk,
    hf_diagonal,
    measure,
    optimize_time,
    plus_state,
    ring_metrics,
    time_sweep,
)
from commutopt.dynamics import DegenerateSpectrumError, StateVector
from commutopt import pauli as pl


def test_plus_state_amplitudes():
    psi = plus_state(3)
    np.testing.assert_allclose(psi.amplitudes, np.full(8, 1 / math.sqrt(8)))


def test_plus_state_has_zero_cost_expectation():
    g = gen_ring(4)
    m = measure(plus_state(4), diagonal_spectrum(g))
    assert abs(m.energy_expectation) < 1e-12
    assert abs(m.ratio) < 1e-12


def test_evolve_diagonal_phase():
    z0 = pl.PauliSum(1, {pl.PauliString.from_word("Z"): 1.0})
    out = evolve(z0, plus_state(1), math.pi / 2)
    expect = np.array([np.exp(-1j * math.pi / 2), np.exp(1j * math.pi / 2)]) / math.sqrt(2)
    np.testing.assert_allclose(out.amplitudes, expect, atol=1e-10)


def test_evolve_t_zero_is_identity():
    g = gen_sk(5, 1)
    psi = plus_state(5)
    out = evolve(build_h1(g), psi, 0.0)
    np.testing.assert_array_equal(out.amplitudes, psi.amplitudes)


def test_evolve_against_dense_eigendecomposition():
    for g, t in ((gen_ring(6), 0.37), (gen_erdos_renyi(7, 0.5, 2), 0.21), (gen_sk(6, 4), 0.11)):
        h = build_h1(g)
        out = evolve(h, plus_state(g.n), t, tol=1e-11)
        dense = sla.expm(-1j * h.dense() * t) @ plus_state(g.n).amplitudes
        assert np.abs(out.amplitudes - dense).max() < 1e-9


def test_evolve_ring_matches_closed_form():
    g = gen_ring(8)
    spec = diagonal_spectrum(g)
    out = evolve(build_h1(g), plus_state(8), 0.23, tol=1e-11)
    m = measure(out, spec)
    analytic = ring_metrics(8, 0.23)
    assert abs(m.energy_expectation - analytic.energy_expectation) < 1e-8
    assert abs(m.pgs - analytic.pgs) < 1e-8


@given(st.integers(0, 2**31 - 1), st.floats(0.01, 1.5))
@settings(max_examples=25, deadline=None)
def test_evolution_is_unitary(seed, t):
    rng = np.random.default_rng(seed)
    g = gen_sk(4, int(rng.integers(1000)))
    out = evolve(build_h1(g), plus_state(4), float(t))
    assert abs(np.linalg.norm(out.amplitudes) - 1.0) <= 1e-10


def test_diagonal_hamiltonian_conserves_metrics():
    g = gen_sk(5, 3)
    spec = diagonal_spectrum(g)
    psi = evolve(build_h1(g), plus_state(5), 0.1)
    before = measure(psi, spec)
    after = measure(evolve(build_hf(g), psi, 2.3), spec)
    assert abs(before.energy_expectation - after.energy_expectation) < 1e-10
    assert abs(before.pgs - after.pgs) < 1e-10


def test_measure_on_ground_basis_state():
    g = gen_ring(4)
    spec = diagonal_spectrum(g)
    amps = np.zeros(16, dtype=complex)
    amps[int(np.argmin(spec.energies))] = 1.0
    m = measure(StateVector(4, amps), spec)
    assert m.ratio == pytest.approx(1.0, abs=1e-12)
    assert m.sigma == pytest.approx(0.0, abs=1e-12)
    assert m.pgs == pytest.approx(1.0, abs=1e-12)


def test_measure_uniform_state_values():
    spec = diagonal_spectrum(gen_ring(4))
    m = measure(plus_state(4), spec)
    assert m.pgs == pytest.approx(2 / 16, abs=1e-12)
    expect_sigma = math.sqrt(float(np.mean(spec.energies**2))) / 4.0
    assert m.sigma == pytest.approx(expect_sigma, abs=1e-12)


def test_measure_rejects_nonnegative_ground():
    spec = diagonal_spectrum(gen_ring(4))
    shifted = spec.__class__(
        energies=spec.energies + 100.0,
        e_min=spec.e_min + 100.0,
        degeneracy=spec.degeneracy,
        ground_indices=spec.ground_indices,
    )
    with pytest.raises(DegenerateSpectrumError):
        measure(plus_state(4), shifted)


def test_time_sweep_matches_single_shots():
    g = gen_erdos_renyi(6, 0.5, 5)
    h = build_h1(g)
    spec = diagonal_spectrum(g)
    swept = time_sweep(h, spec, (0.0, 0.4, 9))
    for t, m in swept:
        single = measure(evolve(h, plus_state(6), t, tol=1e-11), spec)
        assert abs(m.energy_expectation - single.energy_expectation) < 1e-9
        assert abs(m.pgs - single.pgs) < 1e-9


def test_time_sweep_ratio_rises_from_zero():
    g = gen_ring(8)
    swept = time_sweep(build_h1(g), diagonal_spectrum(g), (0.0, 0.5, 51))
    assert abs(swept[0][1].ratio) < 1e-12
    assert swept[1][1].ratio > 0.0


def test_optimize_time_ring():
    g = gen_ring(10)
    rep = optimize_time(build_h1(g), diagonal_spectrum(g), (0.0, 2 * math.pi), 1000)
    assert rep.t_star == pytest.approx(0.23, abs=0.01)
    assert rep.metrics_at_t_star.ratio == pytest.approx(0.58, abs=0.01)


def test_optimize_time_pgs_peak_is_later():
    g = gen_ring(10)
    h, spec = build_h1(g), diagonal_spectrum(g)
    t_ratio = optimize_time(h, spec, (0.0, 1.0), 400, objective="ratio").t_star
    t_pgs = optimize_time(h, spec, (0.0, 1.0), 400, objective="pgs").t_star
    assert t_pgs > t_ratio


def test_optimize_time_interval_containment():
    g = gen_ring(6)
    rep = optimize_time(
        build_h1(g), diagonal_spectrum(g), (0.0, 0.1), 50, constrained=True
    )
    assert 0.0 <= rep.t_star <= 0.1
    assert rep.constrained


def test_short_time_gain_over_small_ensemble():
    delta = 1e-4
    for seed in range(6):
        for g in (gen_erdos_renyi(7, 0.5, seed), gen_sk(6, seed)):
            spec = diagonal_spectrum(g)
            h = build_h1(g)
            r0 = measure(plus_state(g.n), spec).ratio
            r1 = measure(evolve(h, plus_state(g.n), delta), spec).ratio
            assert (r1 - r0) / delta >= -1e-6


def test_generalized_velocity_cubed_cost_still_gains():
    for seed in range(4):
        g = gen_sk(6, seed)
        spec = diagonal_spectrum(g)
        fvals = spec.energies**3
        r0 = measure(plus_state(6), spec).ratio
        out = evolve_h1_general(fvals, plus_state(6), 1e-4)
        r1 = measure(out, spec).ratio
        assert r1 > r0


def test_evolve_h1_general_identity_matches_h1():
    g = gen_erdos_renyi(6, 0.5, 9)
    spec = diagonal_spectrum(g)
    a = evolve_h1_general(spec.energies.copy(), plus_state(6), 0.2)
    b = evolve(build_h1(g), plus_state(6), 0.2)
    assert np.abs(a.amplitudes - b.amplitudes).max() < 1e-9


def test_qz_exp_t_zero_is_identity():
    g = gen_ring(6)
    out = evolve_qz_exp(g, 0.0, plus_state(6))
    np.testing.assert_array_equal(out.amplitudes, plus_state(6).amplitudes)


def test_qz_exp_dense_oracle():
    # normalized conjugated-exponential generator, evolved exactly at n=6
    g = gen_ring(6)
    t = 0.1
    h1 = build_h1(g).dense()
    hi = build_hi(6).dense()
    hf = np.diag(hf_diagonal(g))
    u = sla.expm(1j * h1 * t)
    a = u @ hf @ u.conj().T
    hqz = -1j * (hi @ a - a @ hi)
    lam = math.sqrt(6 / (np.real(np.trace(hqz @ hqz)) / 64))
    dense = sla.expm(-1j * lam * hqz * t) @ plus_state(6).amplitudes
    out = evolve_qz_exp(g, t, plus_state(6), tol=1e-11)
    assert np.abs(out.amplitudes - dense).max() < 1e-8


def test_qz_exp_unitary_on_skm():
    g = gen_sk(8, 12)
    out = evolve_qz_exp(g, 0.15, plus_state(8))
    assert abs(np.linalg.norm(out.amplitudes) - 1.0) <= 1e-10


def test_qz_exp_corrected_dense_oracle():
    # raw combined generator: plain commutator plus the exponential correction
    g = gen_ring(6)
    t = 0.17
    h1 = build_h1(g).dense()
    hi = build_hi(6).dense()
    hf = np.diag(hf_diagonal(g))
    u = sla.expm(1j * h1 * t)
    a = u @ hf @ u.conj().T
    h = h1 + (-1j) * (hi @ a - a @ hi)
    dense = sla.expm(-1j * h * t) @ plus_state(6).amplitudes
    out = evolve_qz_exp_corrected(g, t, plus_state(6), tol=1e-11)
    assert np.abs(out.amplitudes - dense).max() < 1e-8
