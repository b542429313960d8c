"""Split-operator time evolution on the grid.

Two modes share one Strang step (half potential, full kinetic in momentum
space, half potential):

* stochastic: the system sees one concrete noise path; the noise enters as
  an exact extra phase exp(-i*lambda*g(x)*W_n) per step, where W_n is the
  integrated noise over the step, so each trajectory stays unitary.
* effective: the noise average has been performed, leaving the complex
  potential W(x) = V(x) + g(x)F(t) - (i/2)*lambda^2*sigma^2(t)*g(x)^2
  whose negative imaginary part drains the norm.

Time-dependent sigma^2(t) and drive F(t) are sampled at step midpoints.
Boundaries are periodic through the FFT; an optional absorbing mask damps
the edges for scattering-type potentials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft as _fft

from .core import ComplexFrequency, Schedule, SpatialGrid, WaveFunction, norm2
from .oscillator import stationary_eigenfunction

__all__ = [
    "NumericsError",
    "Harmonic",
    "SoftCoulomb",
    "TabulatedField",
    "AbsorbingMask",
    "SystemSpec",
    "EvolutionConfig",
    "Trajectory",
    "effective_potential",
    "step_effective",
    "step_stochastic",
    "evolve",
    "gaussian_state",
    "ground_state",
]


class NumericsError(RuntimeError):
    """Evolution produced non-finite values or broke a structural invariant."""


@dataclass(frozen=True)
class Harmonic:
    omega: float


@dataclass(frozen=True)
class SoftCoulomb:
    """V(x) = -1/sqrt(x^2 + a^2), a smoothed attractive Coulomb well."""

    a: float

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("soft-Coulomb parameter a must be positive")


@dataclass
class TabulatedField:
    """Real field given point by point on the evolution grid."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class AbsorbingMask:
    """Damping band of given width at each grid edge, applied once per step."""

    width: float
    strength: float

    def __post_init__(self):
        if self.width <= 0 or self.strength < 0:
            raise ValueError("mask width must be positive and strength non-negative")


@dataclass
class SystemSpec:
    """Physical content of a run: mass, potential, drive, noise coupling."""

    mass: float = 1.0
    potential: Harmonic | SoftCoulomb | TabulatedField = field(default_factory=lambda: Harmonic(1.0))
    drive: Schedule | float = 0.0
    coupling: str | TabulatedField = "dipole"
    coupling_lambda: float = 1.0
    sigma2: Schedule | float = 0.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        self.drive = Schedule(self.drive) if not isinstance(self.drive, Schedule) else self.drive
        self.sigma2 = Schedule(self.sigma2) if not isinstance(self.sigma2, Schedule) else self.sigma2
        if isinstance(self.coupling, str) and self.coupling != "dipole":
            raise ValueError("coupling must be 'dipole' or a TabulatedField")

    def potential_on(self, grid: SpatialGrid) -> np.ndarray:
        if isinstance(self.potential, Harmonic):
            return 0.5 * self.mass * self.potential.omega**2 * grid.x**2
        if isinstance(self.potential, SoftCoulomb):
            return -1.0 / np.sqrt(grid.x**2 + self.potential.a**2)
        values = self.potential.values
        if values.shape != (grid.n_points,):
            raise ValueError("tabulated potential length must match the grid")
        return values

    def coupling_on(self, grid: SpatialGrid) -> np.ndarray:
        if isinstance(self.coupling, str):
            return grid.x.copy()
        values = self.coupling.values
        if values.shape != (grid.n_points,):
            raise ValueError("tabulated coupling length must match the grid")
        return values

    def lambda2_sigma2_at(self, t: float) -> float:
        s2 = self.sigma2.at(t)
        return self.coupling_lambda**2 * float(s2)


@dataclass
class EvolutionConfig:
    dt: float
    n_steps: int
    snapshot_stride: int = 1
    boundary: str | AbsorbingMask = "periodic"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        if isinstance(self.boundary, str) and self.boundary != "periodic":
            raise ValueError("boundary must be 'periodic' or an AbsorbingMask")


def effective_potential(spec: SystemSpec, grid: SpatialGrid, t: float) -> np.ndarray:
    """Complex potential seen by the noise-averaged amplitude at time t."""
    g = spec.coupling_on(grid)
    w = spec.potential_on(grid).astype(np.complex128)
    w += g * float(spec.drive.at(t))
    w -= 0.5j * spec.lambda2_sigma2_at(t) * g**2
    return w


def _edge_mask(grid: SpatialGrid, mask: AbsorbingMask, dt: float) -> np.ndarray:
    d_lo = grid.x - grid.x_min
    d_hi = grid.x_max - grid.x
    u = np.clip(1.0 - np.minimum(d_lo, d_hi) / mask.width, 0.0, 1.0)
    return np.exp(-mask.strength * dt * u**2)


class _SplitStepper:
    """Factor cache for repeated Strang steps; acts on (..., n_points) arrays."""

    def __init__(self, grid: SpatialGrid, spec: SystemSpec, cfg: EvolutionConfig, stochastic: bool):
        self.grid = grid
        self.spec = spec
        self.dt = cfg.dt
        self.stochastic = stochastic
        self.kinetic = np.exp(-0.5j * grid.k**2 * cfg.dt / spec.mass)
        self.mask = None if isinstance(cfg.boundary, str) else _edge_mask(grid, cfg.boundary, cfg.dt)
        self.g = spec.coupling_on(grid)
        self._v = spec.potential_on(grid)
        self._static = spec.drive.is_constant and (spec.sigma2.is_constant or stochastic)
        self._half_cached = self._half_phase(0.0) if self._static else None

    def _half_phase(self, t_mid: float) -> np.ndarray:
        w = self._v + self.g * float(self.spec.drive.at(t_mid))
        if not self.stochastic:
            w = w - 0.5j * self.spec.lambda2_sigma2_at(t_mid) * self.g**2
        return np.exp(-0.5j * w * self.dt)

    def half_phase(self, t_mid: float) -> np.ndarray:
        return self._half_cached if self._static else self._half_phase(t_mid)

    def step(self, values: np.ndarray, t: float, noise_w=None) -> np.ndarray:
        """One Strang step from t to t+dt; noise_w broadcasts over leading axes."""
        half = self.half_phase(t + 0.5 * self.dt)
        out = values * half
        out = _fft.fft(out, axis=-1)
        out *= self.kinetic
        out = _fft.ifft(out, axis=-1)
        if noise_w is not None:
            phase = np.exp(
                (-1j * self.spec.coupling_lambda) * np.asarray(noise_w)[..., None] * self.g
            )
            out *= phase
        out *= half
        if self.mask is not None:
            out *= self.mask
        return out


def step_effective(psi: WaveFunction, spec: SystemSpec, cfg: EvolutionConfig) -> WaveFunction:
    """One step under the effective complex potential; norm cannot grow."""
    stepper = _SplitStepper(psi.grid, spec, cfg, stochastic=False)
    values = stepper.step(psi.values, psi.time)
    return WaveFunction(psi.grid, values, psi.time + cfg.dt)


def step_stochastic(psi: WaveFunction, spec: SystemSpec, cfg: EvolutionConfig, w_n: float) -> WaveFunction:
    """One unitary step for a given integrated noise increment w_n."""
    stepper = _SplitStepper(psi.grid, spec, cfg, stochastic=True)
    values = stepper.step(psi.values, psi.time, noise_w=w_n)
    return WaveFunction(psi.grid, values, psi.time + cfg.dt)


@dataclass
class Trajectory:
    """Recorded evolution: per-step observables plus strided state snapshots."""

    grid: SpatialGrid
    times: np.ndarray
    norm2: np.ndarray
    x_mean: np.ndarray
    x2_mean: np.ndarray
    probe_x: np.ndarray
    probe_current: np.ndarray  # shape (n_times, n_probes)
    snapshots: list[WaveFunction]


def _observables(grid: SpatialGrid, values: np.ndarray, probe_x: np.ndarray):
    dx = grid.dx
    dens = np.abs(values) ** 2
    n2 = float(np.sum(dens) * dx)
    if n2 > 0.0:
        xm = float(np.sum(grid.x * dens) * dx / n2)
        x2m = float(np.sum(grid.x**2 * dens) * dx / n2)
    else:
        xm = x2m = 0.0
    if probe_x.size:
        dpsi = np.gradient(values, dx)
        j_field = np.real(-1j * np.conj(values) * dpsi)
        j_probe = np.interp(probe_x, grid.x, j_field)
    else:
        j_probe = np.zeros(0)
    return n2, xm, x2m, j_probe


def evolve(
    psi0: WaveFunction,
    spec: SystemSpec,
    cfg: EvolutionConfig,
    noise=None,
    probes: Sequence[float] = (),
) -> Trajectory:
    """Run n_steps of effective (noise=None) or stochastic evolution.

    Records norm^2, <x>, <x^2> and the probability current at the probe
    positions after every step, and keeps full state snapshots every
    snapshot_stride steps (the initial and final states always included).
    Aborts with NumericsError naming the step if values stop being finite.
    """
    stochastic = noise is not None
    if stochastic:
        if noise.n_steps < cfg.n_steps:
            raise ValueError("noise realization shorter than the evolution window")
        if abs(noise.dt - cfg.dt) > 1e-15 * max(1.0, cfg.dt):
            raise ValueError("noise realization dt differs from evolution dt")
    stepper = _SplitStepper(psi0.grid, spec, cfg, stochastic=stochastic)
    probe_x = np.asarray(probes, dtype=float)

    n_rec = cfg.n_steps + 1
    times = psi0.time + cfg.dt * np.arange(n_rec)
    norm2_t = np.empty(n_rec)
    x_mean = np.empty(n_rec)
    x2_mean = np.empty(n_rec)
    j_probe = np.empty((n_rec, probe_x.size))
    snapshots: list[WaveFunction] = []

    values = psi0.values.copy()
    for step in range(n_rec):
        if step > 0:
            w_n = noise.increments[step - 1] if stochastic else None
            values = stepper.step(values, times[step - 1], noise_w=w_n)
            if not np.all(np.isfinite(values.view(float))):
                raise NumericsError(f"non-finite amplitudes at step {step}")
        norm2_t[step], x_mean[step], x2_mean[step], j_probe[step] = _observables(
            psi0.grid, values, probe_x
        )
        if step % cfg.snapshot_stride == 0 or step == cfg.n_steps:
            snapshots.append(WaveFunction(psi0.grid, values.copy(), times[step]))

    return Trajectory(
        grid=psi0.grid,
        times=times,
        norm2=norm2_t,
        x_mean=x_mean,
        x2_mean=x2_mean,
        probe_x=probe_x,
        probe_current=j_probe,
        snapshots=snapshots,
    )


def gaussian_state(grid: SpatialGrid, center: float = 0.0, width: float = 1.0, momentum: float = 0.0) -> WaveFunction:
    """Unit-norm Gaussian packet with <x^2> - <x>^2 = width^2 at t = 0."""
    x = grid.x
    values = np.exp(-((x - center) ** 2) / (4.0 * width**2) + 1j * momentum * x)
    psi = WaveFunction(grid, values)
    psi.values /= np.sqrt(norm2(psi))
    return psi


def ground_state(grid: SpatialGrid, mass: float = 1.0, omega: float = 1.0) -> WaveFunction:
    """Unit-norm oscillator ground state of the noiseless system."""
    values = stationary_eigenfunction(0, mass, ComplexFrequency(omega, 0.0), grid.x)
    psi = WaveFunction(grid, values)
    psi.values /= np.sqrt(norm2(psi))
    return psi
