"""Brute-force check of the sin^2-sequence scaling identity.

For arbitrary Hermitian C and Z, the forward/reversed toggled products

    U_pm = exp(-i [C +- (-1)^N Z] (T - T_N)) ... exp(-i [C +- Z] T_1)

satisfy U_-^dag U_+ = 1 + O(T^(N+1)) when the T_j follow the sin^2
schedule.  This module builds the products directly from segment
exponentials, independent of the simulator, and estimates the exponent
from a log-log fit of the deviation over a T grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import as_operator, assert_hermitian, expm_unitary, norm
from .pulses import PulseSchedule, switching_function, udd_times
from .rng import SplitMix64

# Fit window: below the floor the deviation is roundoff, above the cap
# the power series no longer dominates.
NOISE_FLOOR = 1e-12
SATURATION_CAP = 0.5


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares slope of log(deviation) against log(T)."""

    t_grid: np.ndarray
    deviations: np.ndarray
    slope: float
    intercept: float
    points_used: int


def u_pm_from_schedule(c: np.ndarray, z: np.ndarray, schedule: PulseSchedule,
                       sign: int = +1) -> np.ndarray:
    """Product of segment exponentials exp(-i [C +- (-1)^j Z] dt_j).

    Segment j runs from T_j to T_{j+1} (T_0 = 0, T_{N+1} = T) and carries
    the toggled sign (+-1)(-1)^j; earliest segment applied first.
    """
    c = as_operator(c)
    z = as_operator(z)
    if c.shape != z.shape:
        raise ValueError(f"dimension mismatch: {c.shape} vs {z.shape}")
    assert_hermitian(c, name="c")
    assert_hermitian(z, name="z")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    bounds = schedule.boundaries
    u = np.eye(c.shape[0], dtype=np.complex128)
    for j in range(schedule.n + 1):
        dt = bounds[j + 1] - bounds[j]
        h_seg = c + sign * (-1) ** j * z
        u = expm_unitary(h_seg, dt) @ u
    return u


def build_u_pm(c: np.ndarray, z: np.ndarray, n: int, total_time: float,
               sign: int = +1) -> np.ndarray:
    """U_pm for the sin^2 pulse schedule with ``n`` pulses over ``total_time``."""
    return u_pm_from_schedule(c, z, udd_times(n, total_time), sign)


def yangliu_deviation(c: np.ndarray, z: np.ndarray, n: int, total_time: float) -> float:
    """Spectral-norm deviation ||U_-^dag U_+ - I|| for the sin^2 schedule."""
    u_plus = build_u_pm(c, z, n, total_time, +1)
    u_minus = build_u_pm(c, z, n, total_time, -1)
    d = u_minus.conj().T @ u_plus - np.eye(c.shape[0])
    return norm(d, "spectral")


def scaling_slope(deviation_fn: Callable[[float], float], t_grid) -> ScalingFit:
    """Fit the power-law exponent of ``deviation_fn`` over a log-spaced T grid.

    Points with deviation at the roundoff floor or beyond the saturation
    cap are excluded; at least 3 usable points are required.
    """
    t_grid = np.asarray(sorted(t_grid), dtype=float)
    if t_grid.size < 4:
        raise ValueError("need at least 4 grid points")
    devs = np.array([float(deviation_fn(t)) for t in t_grid])
    usable = (devs > NOISE_FLOOR) & (devs < SATURATION_CAP)
    if usable.sum() < 3:
        raise ValueError(
            f"only {int(usable.sum())} usable points (floor {NOISE_FLOOR:g}, cap {SATURATION_CAP:g})"
        )
    slope, intercept = np.polyfit(np.log(t_grid[usable]), np.log(devs[usable]), 1)
    return ScalingFit(
        t_grid=t_grid,
        deviations=devs,
        slope=float(slope),
        intercept=float(intercept),
        points_used=int(usable.sum()),
    )


def interaction_picture_check(c: np.ndarray, z: np.ndarray, n: int, total_time: float,
                              steps: int, sign: int = +1) -> float:
    """Distance between the segment product and its interaction-picture form.

    The toggled product equals exp(-i C T) times the time-ordered
    exponential of -i F_N(t) Z_I(t) with Z_I(t) = exp(iCt) Z exp(-iCt).
    The time-ordered factor is approximated by ``steps`` left-endpoint
    Euler factors, so the distance shrinks linearly with the step size.
    """
    if steps < 1000:
        raise ValueError("need steps >= 1000")
    c = as_operator(c)
    z = as_operator(z)
    schedule = udd_times(n, total_time)
    u_exact = u_pm_from_schedule(c, z, schedule, sign)

    w, v = np.linalg.eigh(c)
    vh = v.conj().T
    z_tilde = vh @ z @ v
    dt = total_time / steps
    u_ordered = np.eye(c.shape[0], dtype=np.complex128)
    for k in range(steps):
        t = k * dt
        f = switching_function(schedule, t)
        phase = np.exp(1j * w * t)
        z_i = v @ (np.outer(phase, phase.conj()) * z_tilde) @ vh
        u_ordered = expm_unitary(sign * f * z_i, dt) @ u_ordered
    u_approx = (v * np.exp(-1j * w * total_time)) @ vh @ u_ordered
    return norm(u_exact - u_approx, "spectral")


def random_hermitian_pair(dim: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded Hermitian (C, Z) pair, each scaled to unit spectral norm.

    Entries come from the portable splitmix64 stream (real then imaginary
    part, row-major over the strict upper triangle after the diagonal),
    so the pair is reproducible across implementations.
    """
    rng = SplitMix64(seed)

    def draw() -> float:
        return 2.0 * rng.next_float() - 1.0

    def one() -> np.ndarray:
        h = np.zeros((dim, dim), dtype=np.complex128)
        for i in range(dim):
            h[i, i] = draw()
        for i in range(dim):
            for j in range(i + 1, dim):
                val = draw() + 1j * draw()
                h[i, j] = val
                h[j, i] = val.conjugate()
        return h / norm(h, "spectral")

    return one(), one()
