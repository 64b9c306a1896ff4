"""Closed-form ring solution against the state-vector engine."""

import math

import numpy as np
import pytest

from commutopt import (
    build_h1,
    diagonal_spectrum,
    evolve,
    gen_ring,
    measure,
    plus_state,
    ring_energy_and_pgs,
    ring_ground_energy,
    ring_metrics,
    ring_modes,
    ring_optimize,
)


def test_ground_energy_values():
    assert ring_ground_energy(4) == -4.0
    assert ring_ground_energy(8) == -8.0
    # odd rings are frustrated: one unsatisfied edge
    assert ring_ground_energy(5) == -3.0
    assert ring_ground_energy(9) == -7.0


def test_modes_count_and_range():
    for n in (4, 7, 10):
        modes = ring_modes(n)
        assert len(modes.thetas) >= 1
        assert all(0.0 <= th < math.pi for th in modes.thetas)
        # the zero-angle mode appears exactly on frustrated (odd) rings
        assert (0.0 in modes.thetas) == (n % 2 == 1)


def test_metrics_at_zero():
    m = ring_metrics(8, 0.0)
    assert abs(m.energy_expectation) < 1e-12
    assert m.pgs == pytest.approx(2 / 2**8, abs=1e-12)


def test_closed_form_matches_dynamics_even_and_odd():
    for n in (4, 5, 6, 9, 10):
        g = gen_ring(n)
        h = build_h1(g)
        spec = diagonal_spectrum(g)
        for t in (0.07, 0.23, 0.41):
            numeric = measure(evolve(h, plus_state(n), t, tol=1e-11), spec)
            analytic = ring_metrics(n, t)
            assert abs(numeric.energy_expectation - analytic.energy_expectation) < 1e-8
            assert abs(numeric.pgs - analytic.pgs) < 1e-8


def test_energy_and_pgs_vectorized_consistency():
    ts = np.linspace(0.0, 0.5, 11)
    energy, pgs = ring_energy_and_pgs(8, ts)
    for t, e, p in zip(ts, energy, pgs):
        m = ring_metrics(8, float(t))
        assert abs(e - m.energy_expectation) < 1e-12
        assert abs(p - m.pgs) < 1e-12


def test_optimize_large_even_ring():
    rep = ring_optimize(400, (0.0, 0.5), 1000)
    assert rep.t_star == pytest.approx(0.2301, abs=1e-3)
    assert rep.metrics_at_t_star.ratio == pytest.approx(0.5819, abs=5e-4)


def test_optimize_large_odd_ring():
    rep = ring_optimize(401, (0.0, 0.5), 1000)
    assert rep.metrics_at_t_star.ratio == pytest.approx(0.5830, abs=5e-4)


def test_saturation_from_above():
    # finite sizes exceed the large-n ratio and decrease toward it
    ratios = [
        ring_optimize(n, (0.0, 0.5), 600).metrics_at_t_star.ratio
        for n in (8, 16, 64, 256)
    ]
    assert all(a >= b - 1e-12 for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(0.5819, abs=1e-3)


def test_odd_even_gap():
    even = ring_optimize(400, (0.0, 0.5), 800).metrics_at_t_star.ratio
    odd = ring_optimize(401, (0.0, 0.5), 800).metrics_at_t_star.ratio
    assert odd > even
