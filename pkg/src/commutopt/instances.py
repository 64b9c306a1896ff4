"""Problem instance generation and brute-force diagonal spectra.

Reproducibility contract: every generator takes an integer seed and draws
from numpy's Philox counter-based 64-bit generator (`np.random.Generator(
np.random.Philox(seed))`). Normal variates come from
`Generator.standard_normal` (ziggurat method). Identical (kind, n, seed)
tuples therefore produce bit-identical instances across platforms.

Bit convention, used everywhere in the package: qubit k corresponds to bit k
of the basis index (little-endian), and spin s_k = +1 when bit k is 0,
s_k = -1 when bit k is 1.

Instance files are newline-delimited JSON, one object per instance:
{"id", "kind": "ring|regular3|erdos|sk", "n", "seed", "edges": [[i,j,w]...],
 "biases": [h...], "connected": bool}. Subgraph catalog files extend the
schema with "target_edge" and "crossing" fields.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_SPECTRUM_CAP = 24


class InvalidInstanceError(ValueError):
    """Generator preconditions violated (bad n, degree parity, probability...)."""


class ResourceLimitError(RuntimeError):
    """Requested computation exceeds the configured size cap."""


class DegenerateSpectrumError(ValueError):
    """Spectrum has no negative ground energy; ratio metrics are undefined."""


def rng_for(seed: int) -> np.random.Generator:
    """The package-wide seeded generator (Philox, counter-based)."""
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class Graph:
    """Weighted Ising problem: nodes 0..n-1, couplings J_ij, biases h_i."""

    n: int
    edges: tuple[tuple[int, int, float], ...]
    biases: tuple[float, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInstanceError("graph needs at least one node")
        edges = tuple((int(i), int(j), float(w)) for i, j, w in self.edges)
        seen = set()
        for i, j, _ in edges:
            if not (0 <= i < j < self.n):
                raise InvalidInstanceError(f"edge ({i},{j}) violates 0 <= i < j < n")
            if (i, j) in seen:
                raise InvalidInstanceError(f"duplicate edge ({i},{j})")
            seen.add((i, j))
        biases = tuple(float(h) for h in self.biases) or tuple(0.0 for _ in range(self.n))
        if len(biases) != self.n:
            raise InvalidInstanceError("biases length must equal n")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "biases", biases)

    @property
    def has_biases(self) -> bool:
        return any(h != 0.0 for h in self.biases)

    def degree(self, node: int) -> int:
        return sum(1 for i, j, _ in self.edges if node in (i, j))

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        parent = list(range(self.n))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j, _ in self.edges:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
        root = find(0)
        return all(find(v) == root for v in range(self.n))


@dataclass
class DiagonalSpectrum:
    """Per-bitstring energies of the diagonal cost operator.

    energies[b] = sum_ij J_ij s_i s_j + sum_i h_i s_i with the spin/bit
    convention from the module docstring. ground_indices is the sorted array
    of basis indices attaining e_min.
    """

    energies: np.ndarray
    e_min: float
    degeneracy: int
    ground_indices: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.energies.size).bit_length() - 1


def gen_ring(n: int) -> Graph:
    """Unit-weight cycle 0-1-...-(n-1)-0."""
    if n < 3:
        raise InvalidInstanceError("a ring needs n >= 3")
    edges = [(i, i + 1, 1.0) for i in range(n - 1)] + [(0, n - 1, 1.0)]
    return Graph(n, tuple(sorted(edges)))


def gen_random_regular(n: int, degree: int, seed: int, max_tries: int = 10_000) -> Graph:
    """Uniform-ish random regular graph via the pairing model with rejection.

    Each attempt shuffles the degree-replicated stub list and pairs
    consecutive stubs; attempts producing self-loops or repeated edges are
    rejected wholesale and the generator stream continues, so the output is
    deterministic per seed. Disconnected outputs are permitted.
    """
    if degree >= n or degree < 1:
        raise InvalidInstanceError("need 1 <= degree < n")
    if (n * degree) % 2 != 0:
        raise InvalidInstanceError("n * degree must be even")
    rng = rng_for(seed)
    stubs = np.repeat(np.arange(n), degree)
    for _ in range(max_tries):
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        if np.any(lo == hi):
            continue
        keys = lo.astype(np.int64) * n + hi
        if np.unique(keys).size != keys.size:
            continue
        edges = tuple(sorted((int(a), int(b), 1.0) for a, b in zip(lo, hi)))
        return Graph(n, edges)
    raise InvalidInstanceError(
        f"pairing model failed to produce a simple {degree}-regular graph "
        f"on {n} nodes within {max_tries} attempts"
    )


def gen_erdos_renyi(n: int, edge_prob: float, seed: int) -> Graph:
    """Each unordered pair included independently with probability edge_prob.

    Pairs are visited in fixed lexicographic order so the draw sequence, and
    hence the graph, is deterministic per seed.
    """
    if not (0.0 <= edge_prob <= 1.0):
        raise InvalidInstanceError("edge_prob must lie in [0, 1]")
    if n < 1:
        raise InvalidInstanceError("n must be >= 1")
    rng = rng_for(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                edges.append((i, j, 1.0))
    return Graph(n, tuple(edges))


def gen_sk(n: int, seed: int) -> Graph:
    """All-to-all couplings and biases drawn standard normal."""
    if n < 2:
        raise InvalidInstanceError("need n >= 2")
    rng = rng_for(seed)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            edges.append((i, j, float(rng.standard_normal())))
    biases = tuple(float(rng.standard_normal()) for _ in range(n))
    return Graph(n, tuple(edges), biases)


def diagonal_spectrum(g: Graph, cap: int = DEFAULT_SPECTRUM_CAP) -> DiagonalSpectrum:
    """Brute-force energies over all 2^n bitstrings (cost O(2^n * |E|))."""
    if g.n > cap:
        raise ResourceLimitError(f"n={g.n} exceeds spectrum cap {cap}")
    dim = 1 << g.n
    idx = np.arange(dim, dtype=np.int64)
    energies = np.zeros(dim, dtype=np.float64)
    spins = {}

    def spin(k: int) -> np.ndarray:
        if k not in spins:
            spins[k] = 1.0 - 2.0 * ((idx >> k) & 1).astype(np.float64)
        return spins[k]

    for i, j, w in g.edges:
        energies += w * spin(i) * spin(j)
    for i, h in enumerate(g.biases):
        if h != 0.0:
            energies += h * spin(i)
    e_min = float(energies.min())
    if e_min >= 0.0:
        raise DegenerateSpectrumError(
            "ground energy is non-negative; ratio metrics are undefined"
        )
    ground = np.flatnonzero(energies == e_min)
    return DiagonalSpectrum(
        energies=energies,
        e_min=e_min,
        degeneracy=int(ground.size),
        ground_indices=ground,
    )


# -- persistence -----------------------------------------------------------


def instance_id(kind: str, n: int, seed: int) -> str:
    return f"{kind}-n{n}-s{seed}"


def graph_to_record(
    g: Graph, kind: str, seed: int, ident: str | None = None
) -> dict:
    return {
        "id": ident or instance_id(kind, g.n, seed),
        "kind": kind,
        "n": g.n,
        "seed": seed,
        "edges": [[i, j, w] for i, j, w in g.edges],
        "biases": list(g.biases),
        "connected": g.is_connected(),
    }


def record_to_graph(record: dict) -> Graph:
    return Graph(
        n=int(record["n"]),
        edges=tuple((int(i), int(j), float(w)) for i, j, w in record["edges"]),
        biases=tuple(float(h) for h in record.get("biases", [])),
    )


def save_instances(path: str | Path, records: Iterable[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def load_instances(path: str | Path) -> list[dict]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


_GENERATORS = {
    "ring": lambda n, seed, **kw: gen_ring(n),
    "regular3": lambda n, seed, **kw: gen_random_regular(n, 3, seed),
    "erdos": lambda n, seed, **kw: gen_erdos_renyi(n, kw.get("edge_prob", 2.0 / 3.0), seed),
    "sk": lambda n, seed, **kw: gen_sk(n, seed),
}


def generate(kind: str, n: int, seed: int, **kwargs) -> Graph:
    """Dispatch by kind tag (the same tags used in instance files)."""
    try:
        gen = _GENERATORS[kind]
    except KeyError:
        raise InvalidInstanceError(f"unknown instance kind {kind!r}") from None
    return gen(n, seed, **kwargs)
