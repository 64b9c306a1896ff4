"""Closed-form evaluation of velocity-operator dynamics on unit-weight rings.

The ring problem decouples into independent momentum modes theta_k (free
fermions after the standard chain mapping), so the energy expectation and
ground-state probability of the evolved plus state have per-mode closed
forms valid to hundreds of sites:

    <Hf>(t) = sum_k F_k,   F_k = 2 cos(theta_k) cos(8 sin(theta_k) t)
                                 - 2 sin(theta_k) sin(8 sin(theta_k) t)
    P_gs(t) = prod_k G_k,  G_k = (1 - cos(theta_k) cos(8 sin(theta_k) t)
                                    + sin(theta_k) sin(8 sin(theta_k) t)) / 2

with theta_k = (2k+1) pi / n for even n (anti-periodic sector) and
theta_k = 2 pi k / n for odd n, k = 0..floor((n-1)/2); for odd n the k = 0
mode is frozen and contributes F_0 = G_0 = 1.

The time scale is that of the *unnormalized* velocity operator built by
build_h1 on the ring. Ground energy by exact combinatorics: the best cut is
n for even n and n-1 for odd n, so e_min = -n (even) and -(n-2) (odd).

Approximation ratios reported by this module normalize the energy by the
best-cut edge count (minus one unit per cut edge): -n for even rings, where
this coincides with the exact minimum energy, and -(n-1) for odd rings,
where the exact minimum is -(n-2) because the one uncut edge of a
frustrated odd cycle costs +1. The cut-count scale keeps the odd-ring ratio
marginally above the even-ring saturation value at large n (0.5833 at
n=401 versus 0.5819), matching how two-regular benchmarks are usually
normalized; the exact minimum remains available via ring_ground_energy.
Sigma is not provided by this module (reported as None).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Metrics, OptimumReport, golden_section_max
from .instances import InvalidInstanceError


@dataclass(frozen=True)
class RingModes:
    n: int
    parity: str  # "even" | "odd"
    thetas: tuple[float, ...]


def ring_modes(n: int) -> RingModes:
    if n < 3:
        raise InvalidInstanceError("ring closed form needs n >= 3")
    k = np.arange((n - 1) // 2 + 1)
    if n % 2 == 0:
        thetas = (2 * k + 1) * math.pi / n
        parity = "even"
    else:
        thetas = 2 * math.pi * k / n
        parity = "odd"
    return RingModes(n=n, parity=parity, thetas=tuple(float(t) for t in thetas))


def ring_ground_energy(n: int) -> float:
    """Exact minimum of the ring cost function (frustrated for odd n)."""
    return float(-n if n % 2 == 0 else -(n - 2))


def _ratio_scale(n: int) -> float:
    """Energy scale for ratios: one unit per edge of the best cut."""
    return float(-n if n % 2 == 0 else -(n - 1))


def _mode_arrays(n: int) -> tuple[np.ndarray, bool]:
    modes = ring_modes(n)
    return np.asarray(modes.thetas), modes.parity == "odd"


def ring_energy_and_pgs(n: int, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized <Hf>(t) and P_gs(t) for an array of times."""
    thetas, odd = _mode_arrays(n)
    if odd:
        thetas = thetas[1:]  # k = 0 handled as frozen constants below
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    ct = np.cos(thetas)[None, :]
    st = np.sin(thetas)[None, :]
    phase = 8.0 * st * ts[:, None]
    cph = np.cos(phase)
    sph = np.sin(phase)
    f = 2.0 * ct * cph - 2.0 * st * sph
    g = (1.0 - ct * cph + st * sph) / 2.0
    energy = f.sum(axis=1)
    pgs = g.prod(axis=1)
    if odd:
        energy += 1.0
    return energy, pgs


def ring_metrics(n: int, t: float) -> Metrics:
    """Closed-form metrics of the evolved plus state at time t."""
    energy, pgs = ring_energy_and_pgs(n, np.array([t]))
    return Metrics(
        energy_expectation=float(energy[0]),
        ratio=float(energy[0] / _ratio_scale(n)),
        pgs=float(pgs[0]),
        sigma=None,
    )


def _objective_array(n: int, ts: np.ndarray, objective: str) -> np.ndarray:
    energy, pgs = ring_energy_and_pgs(n, ts)
    if objective == "ratio":
        return energy / _ratio_scale(n)
    if objective == "pgs":
        return pgs
    raise ValueError(f"unknown objective {objective!r}")


def ring_optimize(
    n: int,
    interval: tuple[float, float] = (0.0, 2.0 * math.pi),
    divisions: int = 1000,
    objective: str = "ratio",
    grid_only: bool = False,
    refine_tol: float = 1e-7,
    constrained: bool = False,
) -> OptimumReport:
    """Maximize the closed-form objective over a grid, then refine.

    Ties break toward smaller t (first maximal grid entry)."""
    lo, hi = float(interval[0]), float(interval[1])
    if lo < 0 or hi <= lo:
        raise ValueError("need 0 <= lo < hi")
    if divisions < 2:
        raise ValueError("divisions must be >= 2")
    ts = np.linspace(lo, hi, divisions + 1)
    values = _objective_array(n, ts, objective)
    best = int(np.argmax(values))
    t_star = float(ts[best])
    best_val = float(values[best])
    if not grid_only:
        a = float(ts[max(best - 1, 0)])
        b = float(ts[min(best + 1, len(ts) - 1)])

        def f(t: float) -> float:
            return float(_objective_array(n, np.array([t]), objective)[0])

        t_ref, val_ref = golden_section_max(f, a, b, refine_tol)
        if val_ref > best_val:
            t_star, best_val = float(t_ref), float(val_ref)
    return OptimumReport(
        t_star=t_star,
        metrics_at_t_star=ring_metrics(n, t_star),
        grid_lo=lo,
        grid_hi=hi,
        divisions=divisions,
        objective=objective,
        constrained=constrained,
    )
