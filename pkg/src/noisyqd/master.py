"""Grid evolution of the noise-averaged density matrix.

The averaged matrix rho(x_f, x_i) obeys ket-side evolution under the
effective complex potential and bra-side evolution under its conjugate
(the loss part), plus a fluctuation-induced coupling e^{+lam^2 sigma^2
x_f x_i dt} between the two sides (the gain part).  Loss alone drains the
trace; loss and gain together combine into the dephasing factor
e^{-(lam^2 sigma^2 / 2)(g_f - g_i)^2 dt}, which is exactly 1 on the
diagonal, so the trace is conserved while off-diagonal coherence decays.

include_gain switches the fluctuation term; frozen_kinetic disables the
kinetic phases so the pure-dephasing closed form can be checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .core import DensityMatrix, SpatialGrid
from .propagation import NumericsError, SystemSpec

__all__ = [
    "MasterConfig",
    "DensityTrajectory",
    "liouville_step",
    "evolve_density",
    "trace",
    "purity",
]

_HERMITICITY_ABORT = 1e-8


@dataclass
class MasterConfig:
    dt: float
    n_steps: int
    snapshot_stride: int = 1
    include_gain: bool = True
    frozen_kinetic: bool = False

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")


def trace(rho: DensityMatrix) -> complex:
    """Sum of the diagonal times dx; 1 for a normalized state."""
    return complex(np.trace(rho.values) * rho.grid.dx)


def purity(rho: DensityMatrix) -> float:
    """Tr rho^2 = sum_jk rho(j,k) rho(k,j) dx^2; 1 only for pure states."""
    return float(np.einsum("jk,kj->", rho.values, rho.values).real * rho.grid.dx**2)


class _LiouvilleStepper:
    """Cached Strang factors for rho(x_f, x_i) steps.

    Diagonal half-factor construction differs by gain setting on purpose:
    with gain the exponent carries (g_f - g_i)^2 so the diagonal is exactly
    one; without gain it is the outer product of the two one-sided
    effective half phases, so loss-only evolution factorizes into
    independent ket and bra evolutions to rounding accuracy.
    """

    def __init__(self, grid: SpatialGrid, spec: SystemSpec, mcfg: MasterConfig):
        self.grid = grid
        self.spec = spec
        self.mcfg = mcfg
        self.g = spec.coupling_on(grid)
        self.v = spec.potential_on(grid)
        k = grid.k
        self.kinetic2d = None
        if not mcfg.frozen_kinetic:
            kf = np.exp(-0.5j * k**2 * mcfg.dt / spec.mass)
            self.kinetic2d = np.outer(kf, kf.conj())
        self._static = spec.drive.is_constant and spec.sigma2.is_constant
        self._half_cached = self._half_factor(0.0) if self._static else None

    def _half_factor(self, t_mid: float) -> np.ndarray:
        veff = self.v + self.g * float(self.spec.drive.at(t_mid))
        l2s2 = self.spec.lambda2_sigma2_at(t_mid)
        dt = self.mcfg.dt
        if self.mcfg.include_gain:
            dv = veff[:, None] - veff[None, :]
            dg = self.g[:, None] - self.g[None, :]
            return np.exp(-0.5j * dt * dv - 0.25 * dt * l2s2 * dg**2)
        h = np.exp(-0.5j * dt * veff - 0.25 * dt * l2s2 * self.g**2)
        return np.outer(h, h.conj())

    def half_factor(self, t_mid: float) -> np.ndarray:
        return self._half_cached if self._static else self._half_factor(t_mid)

    def step(self, values: np.ndarray, t: float) -> np.ndarray:
        half = self.half_factor(t + 0.5 * self.mcfg.dt)
        out = values * half
        if self.kinetic2d is not None:
            out = _fft.ifft2(_fft.fft2(out) * self.kinetic2d)
        out *= half
        return out


def liouville_step(rho: DensityMatrix, spec: SystemSpec, mcfg: MasterConfig) -> DensityMatrix:
    """One Strang step of the averaged-density evolution."""
    if rho.hermiticity_defect() > _HERMITICITY_ABORT:
        raise NumericsError("density matrix lost Hermiticity beyond 1e-8")
    stepper = _LiouvilleStepper(rho.grid, spec, mcfg)
    return DensityMatrix(rho.grid, stepper.step(rho.values, rho.time), rho.time + mcfg.dt)


@dataclass
class DensityTrajectory:
    grid: SpatialGrid
    times: np.ndarray
    trace: np.ndarray  # complex
    purity: np.ndarray
    diagonal: np.ndarray  # real part of rho(x,x), shape (n_times, n_points)
    snapshots: list[DensityMatrix]


def evolve_density(rho0: DensityMatrix, spec: SystemSpec, mcfg: MasterConfig) -> DensityTrajectory:
    """Evolve rho0 for n_steps, logging trace, purity and the diagonal.

    Requires trace(rho0) = 1 within 1e-8.  Aborts with NumericsError if the
    state loses Hermiticity beyond 1e-8 or stops being finite.
    """
    tr0 = trace(rho0)
    if abs(tr0 - 1.0) > 1e-8:
        raise ValueError(f"initial trace must be 1, got {tr0}")
    stepper = _LiouvilleStepper(rho0.grid, spec, mcfg)

    n_rec = mcfg.n_steps + 1
    times = rho0.time + mcfg.dt * np.arange(n_rec)
    trace_t = np.empty(n_rec, dtype=np.complex128)
    purity_t = np.empty(n_rec)
    diagonal = np.empty((n_rec, rho0.grid.n_points))
    snapshots: list[DensityMatrix] = []

    values = rho0.values.copy()
    dx = rho0.grid.dx
    for step in range(n_rec):
        if step > 0:
            values = stepper.step(values, times[step - 1])
            if not np.all(np.isfinite(values.view(float))):
                raise NumericsError(f"non-finite density at step {step}")
            defect = float(np.max(np.abs(values - values.conj().T)))
            if defect > _HERMITICITY_ABORT:
                raise NumericsError(
                    f"density matrix lost Hermiticity at step {step} (defect {defect:.3e})"
                )
        trace_t[step] = np.trace(values) * dx
        purity_t[step] = np.einsum("jk,kj->", values, values).real * dx * dx
        diagonal[step] = np.diagonal(values).real
        if step % mcfg.snapshot_stride == 0 or step == mcfg.n_steps:
            snapshots.append(DensityMatrix(rho0.grid, values.copy(), times[step]))

    return DensityTrajectory(
        grid=rho0.grid,
        times=times,
        trace=trace_t,
        purity=purity_t,
        diagonal=diagonal,
        snapshots=snapshots,
    )
