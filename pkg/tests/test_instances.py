"""Instance generation, persistence, and diagonal spectra."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from commutopt import (
    InvalidInstanceError,
    diagonal_spectrum,
    gen_erdos_renyi,
    gen_random_regular,
    gen_ring,
    gen_sk,
    generate,
    instance_id,
    load_instances,
    save_instances,
)
from commutopt.instances import graph_to_record, record_to_graph


def test_ring_structure():
    g = gen_ring(6)
    assert g.n == 6
    assert len(g.edges) == 6
    degree = [0] * 6
    for i, j, w in g.edges:
        assert w == 1.0
        degree[i] += 1
        degree[j] += 1
    assert degree == [2] * 6


def test_ring_rejects_tiny():
    with pytest.raises(InvalidInstanceError):
        gen_ring(2)


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_generators_deterministic_per_seed(seed):
    a = gen_erdos_renyi(8, 0.5, seed)
    b = gen_erdos_renyi(8, 0.5, seed)
    assert a.edges == b.edges
    s1 = gen_sk(6, seed)
    s2 = gen_sk(6, seed)
    assert s1.edges == s2.edges and s1.biases == s2.biases


def test_erdos_edges_are_simple():
    g = gen_erdos_renyi(10, 0.4, 3)
    seen = set()
    for i, j, w in g.edges:
        assert 0 <= i < j < 10
        assert w == 1.0
        assert (i, j) not in seen
        seen.add((i, j))


def test_sk_is_complete_with_biases():
    n = 7
    g = gen_sk(n, 5)
    assert len(g.edges) == n * (n - 1) // 2
    assert len(g.biases) == n
    assert any(h != 0.0 for h in g.biases)


def test_sk_coupling_moments():
    draws = [w for s in range(40) for _, _, w in gen_sk(8, s).edges]
    arr = np.array(draws)
    assert abs(arr.mean()) < 0.05
    assert 0.9 < arr.var() < 1.1


def test_random_regular_degrees():
    g = gen_random_regular(10, 3, 1)
    degree = [0] * 10
    for i, j, _ in g.edges:
        degree[i] += 1
        degree[j] += 1
    assert degree == [3] * 10


def test_generate_dispatch_matches_direct():
    assert generate("ring", 6, 0).edges == gen_ring(6).edges
    assert generate("sk", 6, 3).edges == gen_sk(6, 3).edges


def test_instance_id_distinct():
    ids = {instance_id(k, n, s) for k in ("ring", "erdos") for n in (6, 8) for s in (0, 1)}
    assert len(ids) == 8


def test_record_round_trip(tmp_path):
    records = [
        graph_to_record(gen_sk(5, 2), "sk", 2),
        graph_to_record(gen_ring(6), "ring", 0),
    ]
    path = tmp_path / "instances.ndjson"
    save_instances(path, records)
    loaded = load_instances(path)
    assert [r["id"] for r in loaded] == [r["id"] for r in records]
    for rec, orig_rec in zip(loaded, records):
        g = record_to_graph(rec)
        o = record_to_graph(orig_rec)
        assert g.n == o.n and g.edges == o.edges and g.biases == o.biases


def test_spectrum_against_brute_force():
    g = gen_sk(5, 7)
    spec = diagonal_spectrum(g)
    dim = 1 << 5
    expected = np.zeros(dim)
    for b in range(dim):
        s = [1.0 - 2.0 * ((b >> q) & 1) for q in range(5)]
        e = sum(w * s[i] * s[j] for i, j, w in g.edges)
        e += sum(h * s[q] for q, h in enumerate(g.biases))
        expected[b] = e
    np.testing.assert_allclose(spec.energies, expected, atol=1e-12)
    assert spec.e_min == expected.min()


def test_spectrum_ring_ground_degeneracy():
    # even antiferromagnetic ring: two alternating ground configurations
    spec = diagonal_spectrum(gen_ring(6))
    assert spec.e_min == -6.0
    assert int((spec.energies == spec.e_min).sum()) == 2
