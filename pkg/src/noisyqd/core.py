"""Shared domain types and basic observables for 1D noisy quantum dynamics.

Everything lives on a uniform position grid with hbar = 1; masses and
frequencies are dimensionless.  States are complex amplitude arrays and are
not assumed normalized: evolution under a potential with a negative
imaginary part shrinks the norm, and that decay is part of the physics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "Schedule",
    "SpatialGrid",
    "WaveFunction",
    "ComplexFrequency",
    "OscillatorSpec",
    "NoiseRealization",
    "DensityMatrix",
    "norm2",
    "expectation",
    "probability_current",
]


ScheduleLike = Union[float, int, "Schedule", Callable[[float], float]]


class Schedule:
    """A real-valued function of time: constant, tabulated, or callable.

    Tabulated schedules interpolate linearly and refuse evaluation outside
    the tabulated window, so a schedule must cover the full evolution span.
    """

    def __init__(self, value: ScheduleLike):
        if isinstance(value, Schedule):
            self._kind = value._kind
            self._const = value._const
            self._times = value._times
            self._values = value._values
            self._func = value._func
            return
        self._const = 0.0
        self._times = None
        self._values = None
        self._func = None
        if callable(value):
            self._kind = "callable"
            self._func = value
        else:
            self._kind = "constant"
            self._const = float(value)

    @classmethod
    def tabulated(cls, times, values) -> "Schedule":
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("tabulated schedule needs matching 1D times/values")
        if times.size < 2 or np.any(np.diff(times) <= 0):
            raise ValueError("tabulated times must be strictly increasing, length >= 2")
        sched = cls(0.0)
        sched._kind = "tabulated"
        sched._times = times
        sched._values = values
        return sched

    @property
    def is_constant(self) -> bool:
        return self._kind == "constant"

    def constant_value(self) -> float:
        if self._kind != "constant":
            raise ValueError("schedule is time dependent; a constant value was required")
        return self._const

    def at(self, t) -> np.ndarray | float:
        if self._kind == "constant":
            return self._const if np.isscalar(t) else np.full(np.shape(t), self._const)
        if self._kind == "callable":
            if np.isscalar(t):
                return float(self._func(t))
            return np.array([float(self._func(ti)) for ti in np.asarray(t).ravel()]).reshape(np.shape(t))
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < self._times[0] - 1e-12) or np.any(t_arr > self._times[-1] + 1e-12):
            raise ValueError("schedule evaluated outside its tabulated window")
        out = np.interp(t_arr, self._times, self._values)
        return float(out) if np.isscalar(t) else out

    def __repr__(self):
        if self._kind == "constant":
            return f"Schedule({self._const})"
        return f"Schedule(<{self._kind}>)"


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform 1D position grid, endpoints included."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 8:
            raise ValueError("grid needs at least 8 points")
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers of the discrete Fourier basis (period n*dx)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    def __eq__(self, other):
        return (
            isinstance(other, SpatialGrid)
            and self.x_min == other.x_min
            and self.x_max == other.x_max
            and self.n_points == other.n_points
        )

    def __hash__(self):
        return hash((self.x_min, self.x_max, self.n_points))


@dataclass
class WaveFunction:
    """Complex amplitudes on a grid at a given time.  Not necessarily normalized."""

    grid: SpatialGrid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("amplitude array length must equal grid.n_points")

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.values.copy(), self.time)


@dataclass(frozen=True)
class ComplexFrequency:
    """Oscillator frequency Omega = omega1 - i*omega2 with omega1, omega2 >= 0.

    omega1 sets the oscillation and spatial confinement, omega2 the damping.
    """

    omega1: float
    omega2: float

    def __post_init__(self):
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("omega1 and omega2 must be non-negative")

    @property
    def value(self) -> complex:
        return complex(self.omega1, -self.omega2)

    @property
    def squared(self) -> complex:
        return self.value * self.value


@dataclass
class OscillatorSpec:
    """Harmonic system linearly coupled to white noise of variance sigma2.

    The noise couples through the position operator with strength
    coupling_lambda; lambda^2 * sigma2 is the only combination the averaged
    dynamics sees.
    """

    mass: float = 1.0
    omega: float = 1.0
    coupling_lambda: float = 1.0
    sigma2: float = 0.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be non-negative")

    @property
    def lambda2_sigma2(self) -> float:
        return self.coupling_lambda**2 * self.sigma2

    @property
    def sigma_bar2(self) -> float:
        """Noise strength per unit mass, lambda^2 sigma^2 / m."""
        return self.lambda2_sigma2 / self.mass


@dataclass
class NoiseRealization:
    """One sampled white-noise path, stored as per-step integrated increments.

    increments[n] is the integral of the noise over step n, a Gaussian draw
    of mean 0 and variance variance_schedule[n] * dt.
    """

    dt: float
    increments: np.ndarray
    variance_schedule: np.ndarray

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        self.increments = np.asarray(self.increments, dtype=float)
        self.variance_schedule = np.asarray(self.variance_schedule, dtype=float)
        if self.increments.shape != self.variance_schedule.shape:
            raise ValueError("increments and variance_schedule must have equal length")

    @property
    def n_steps(self) -> int:
        return self.increments.shape[0]


@dataclass
class DensityMatrix:
    """Complex field rho(x_f, x_i) on the grid x grid square."""

    grid: SpatialGrid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        n = self.grid.n_points
        if self.values.shape != (n, n):
            raise ValueError("density matrix must be n_points x n_points")

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.grid, self.values.copy(), self.time)

    @classmethod
    def from_pure(cls, psi: WaveFunction) -> "DensityMatrix":
        return cls(psi.grid, np.outer(psi.values, np.conj(psi.values)), psi.time)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.values - self.values.conj().T)))


def norm2(psi: WaveFunction) -> float:
    """Squared L2 norm, sum |psi_j|^2 dx."""
    return float(np.sum(np.abs(psi.values) ** 2) * psi.grid.dx)


def expectation(psi: WaveFunction, f) -> float:
    """Expectation of a real function of position in the state psi.

    f may be a callable of x or an array already evaluated on the grid.
    Raises on a zero-norm state.
    """
    n2 = norm2(psi)
    if n2 <= 0.0:
        raise ValueError("expectation of an empty (zero-norm) state")
    fx = f(psi.grid.x) if callable(f) else np.asarray(f, dtype=float)
    return float(np.sum(fx * np.abs(psi.values) ** 2) * psi.grid.dx / n2)


def probability_current(psi: WaveFunction) -> np.ndarray:
    """Probability current Re[-i psi* d(psi)/dx] on the grid.

    Central differences at interior points, one-sided first order at the
    two edges; the edges are therefore only first-order accurate.
    """
    v = psi.values
    dx = psi.grid.dx
    dpsi = np.empty_like(v)
    dpsi[1:-1] = (v[2:] - v[:-2]) / (2.0 * dx)
    dpsi[0] = (v[1] - v[0]) / dx
    dpsi[-1] = (v[-1] - v[-2]) / dx
    return np.real(-1j * np.conj(v) * dpsi)
