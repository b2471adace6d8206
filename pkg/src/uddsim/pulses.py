"""Pulse schedules, the switching sign function, and pulse fields/unitaries.

Times are dimensionless throughout.  Two schedules are provided: the
sin**2 sequence T_j = T sin^2(j pi / (2N+2)) and an equidistant
(CPMG-style) baseline with pulse centers at T (2j-1) / (2N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import PolarizationOperator
from .linalg import as_operator


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered pulse times inside (0, total_time)."""

    n: int
    total_time: float
    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if self.total_time <= 0:
            raise ValueError("total_time must be positive")
        if times.size != self.n:
            raise ValueError(f"expected {self.n} times, got {times.size}")
        if times.size:
            if not np.all(np.diff(times) > 0):
                raise ValueError("pulse times must be strictly increasing")
            if times[0] <= 0 or times[-1] >= self.total_time:
                raise ValueError("pulse times must lie strictly inside (0, total_time)")

    @property
    def boundaries(self) -> np.ndarray:
        """Segment boundaries [0, T_1, ..., T_N, T]."""
        return np.concatenate([[0.0], self.times, [self.total_time]])


@dataclass(frozen=True)
class PulseShape:
    """Either an ideal instantaneous kick or a Gaussian of width ``c``."""

    kind: str  # "delta" | "gaussian"
    c: float | None = None

    def __post_init__(self):
        if self.kind not in ("delta", "gaussian"):
            raise ValueError(f"unknown pulse shape {self.kind!r}")
        if self.kind == "gaussian" and (self.c is None or self.c <= 0):
            raise ValueError("gaussian shape needs a positive width c")


def udd_times(n: int, total_time: float) -> PulseSchedule:
    """Schedule with times T sin^2(j pi / (2n+2)), j = 1..n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    j = np.arange(1, n + 1)
    times = total_time * np.sin(j * np.pi / (2 * n + 2)) ** 2
    return PulseSchedule(n=n, total_time=total_time, times=times)


def periodic_times(n: int, total_time: float) -> PulseSchedule:
    """Equidistant baseline with centers at T (2j-1) / (2n), j = 1..n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    j = np.arange(1, n + 1)
    times = total_time * (2 * j - 1) / (2 * n)
    return PulseSchedule(n=n, total_time=total_time, times=times)


def switching_function(schedule: PulseSchedule, t):
    """Sign (-1)**j accumulated after j pulses; +-1 for t in [0, T].

    At an exact pulse time the right-limit value is returned (the pulse
    is counted as already applied); measure zero, but a deterministic
    rule keeps tests exact.  Accepts scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > schedule.total_time):
        raise ValueError("t outside [0, total_time]")
    j = np.searchsorted(schedule.times, t_arr, side="right")
    out = np.where(j % 2 == 0, 1, -1)
    return int(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def pulse_unitary(p: PolarizationOperator) -> np.ndarray:
    """Instantaneous pulse exp(-i (pi/2) P) = -i P, exact since P**2 = I."""
    return -1j * p.op


def gaussian_amplitude(schedule: PulseSchedule, c: float, t) -> np.ndarray | float:
    """Scalar field amplitude (pi/2) sum_j g_c(t - T_j) at time(s) ``t``.

    g_c(x) = exp(-x**2 / c**2) / (c sqrt(pi)) integrates to 1, so each
    pulse carries area pi/2.  The field exists only during [0, T];
    tails falling outside are lost (no renormalization).
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0) or np.any(t_arr > schedule.total_time):
        raise ValueError("t outside [0, total_time]")
    x = t_arr[:, None] - schedule.times[None, :]
    amp = (np.pi / 2) * np.exp(-((x / c) ** 2)).sum(axis=1) / (c * np.sqrt(np.pi))
    return float(amp[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else amp


def control_field(
    p: PolarizationOperator,
    schedule: PulseSchedule,
    shape: PulseShape,
    t: float,
) -> np.ndarray:
    """Control Hamiltonian H_c(t) = (pi/2) sum_j g_c(t - T_j) P for gaussian pulses.

    The delta shape has no finite field value; instantaneous pulses are
    handled by the delta evolution path instead.
    """
    if shape.kind != "gaussian":
        raise ValueError("delta pulses have no field value; use the delta evolution path")
    return gaussian_amplitude(schedule, shape.c, t) * as_operator(p.op)
