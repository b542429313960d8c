"""Cross-route verification: the three independent evolution routes must agree.

The suite runs the harmonic benchmark (m=1, omega=1, lambda^2 sigma^2 =
0.2, ground-state start) through three comparisons:

* the Gaussian characteristic identity of the sampled noise increments,
* averaged stochastic amplitude vs effective complex-potential evolution,
* averaged outer products vs the gain-on density-matrix evolution.

Statistical comparisons carry a roundoff floor: where the Monte Carlo
stderr drops below the deterministic split-step roundoff (~1e-12 of the
field maximum) the comparison happens at that floor, since neither route
resolves anything smaller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, SpatialGrid
from .ensemble import (
    EnsembleConfig,
    average_amplitude_sweep,
    average_density,
    noise_characteristic_check,
)
from .master import MasterConfig, evolve_density
from .propagation import EvolutionConfig, Harmonic, SystemSpec, evolve, ground_state

__all__ = ["VerificationResult", "run_verification"]

# Fixed benchmark scenario shared by all cross-route comparisons.
BENCH_MASS = 1.0
BENCH_OMEGA = 1.0
BENCH_LAMBDA = 1.0
BENCH_SIGMA2 = 0.2

AMPLITUDE_TOL = 5.0       # L2 distance limit in units of the stderr L2 norm
POINTWISE_TOL = 3.0       # per-point limit in stderr units (amplitude)
DENSITY_TOL = 4.0         # per-entry limit in stderr units (density)
MIN_FRACTION = 0.95
SCALING_REL_TOL = 0.25    # stderr must halve within 25% when n quadruples
ROUNDOFF_FLOOR = 1e-12    # absolute floor, relative to the field maximum
CHARACTERISTIC_Z_MAX = 4.0


@dataclass
class VerificationResult:
    report: dict
    trajectory: object       # effective-evolution Trajectory (figure artifacts)
    density_trajectory: object  # gain-on DensityTrajectory

    @property
    def all_passed(self) -> bool:
        return bool(self.report["all_passed"])


def _bench_spec() -> SystemSpec:
    return SystemSpec(mass=BENCH_MASS, potential=Harmonic(BENCH_OMEGA),
                      coupling_lambda=BENCH_LAMBDA, sigma2=BENCH_SIGMA2)


def _characteristic_criterion(master_seed: int) -> dict:
    out = noise_characteristic_check(x=1.0, dt=0.01, sigma2=1.0, lam=1.0,
                                     n_draws=10**5, seed=master_seed)
    return {
        "name": "gaussian_characteristic",
        "passed": bool(out["z"] < CHARACTERISTIC_Z_MAX),
        "z": out["z"],
        "z_max": CHARACTERISTIC_Z_MAX,
        "empirical_re": float(out["empirical"].real),
        "empirical_im": float(out["empirical"].imag),
        "exact": float(np.real(out["exact"])),
        "stderr": out["stderr"],
    }


def _amplitude_criterion(vc, grid: SpatialGrid, evo_cfg: EvolutionConfig, trajectory) -> dict:
    spec = _bench_spec()
    psi0 = ground_state(grid, BENCH_MASS, BENCH_OMEGA)
    n_large = vc.n_realizations
    n_small = n_large // vc.scaling_fraction
    sweep = average_amplitude_sweep(
        psi0, spec, evo_cfg,
        EnsembleConfig(n_large, master_seed=vc.master_seed),
        counts=(n_small, n_large),
    )
    exact = trajectory.snapshots[-1].values
    dx = grid.dx
    floor = ROUNDOFF_FLOOR * float(np.max(np.abs(exact)))

    final = sweep[n_large]
    diff = np.abs(final.mean.values - exact)
    l2_dist = float(np.sqrt(np.sum(diff**2) * dx))
    stderr_l2 = final.stderr_l2()
    fraction = float(np.mean(diff <= POINTWISE_TOL * final.stderr_field + floor))
    ratio = sweep[n_small].stderr_l2() / stderr_l2
    expected = np.sqrt(vc.scaling_fraction)
    scaling_ok = abs(ratio - expected) <= SCALING_REL_TOL * expected

    passed = l2_dist < AMPLITUDE_TOL * stderr_l2 and fraction >= MIN_FRACTION and scaling_ok
    return {
        "name": "amplitude_equivalence",
        "passed": bool(passed),
        "n": n_large,
        "l2_distance": l2_dist,
        "stderr_l2": stderr_l2,
        "distance_over_stderr": l2_dist / stderr_l2 if stderr_l2 else float("inf"),
        "distance_limit": AMPLITUDE_TOL,
        "pointwise_fraction": fraction,
        "min_fraction": MIN_FRACTION,
        "stderr_scaling": {
            "n_small": n_small,
            "n_large": n_large,
            "ratio": float(ratio),
            "expected": float(expected),
            "rel_tolerance": SCALING_REL_TOL,
            "passed": bool(scaling_ok),
        },
        "mean_norm2": float(np.sum(np.abs(final.mean.values) ** 2) * dx),
        "effective_norm2": float(trajectory.norm2[-1]),
    }


def _density_criterion(vc) -> tuple[dict, object]:
    grid = SpatialGrid(-vc.half_width, vc.half_width, vc.density_grid_points)
    spec = _bench_spec()
    psi0 = ground_state(grid, BENCH_MASS, BENCH_OMEGA)
    n_steps = round(vc.t_final / vc.dt)
    evo_cfg = EvolutionConfig(dt=vc.dt, n_steps=n_steps, snapshot_stride=vc.snapshot_stride)
    averaged = average_density(psi0, spec, evo_cfg,
                               EnsembleConfig(vc.density_n_realizations, master_seed=vc.master_seed))

    rho0 = DensityMatrix.from_pure(psi0)
    rho0.values /= np.trace(rho0.values).real * grid.dx
    mcfg = MasterConfig(dt=vc.dt, n_steps=n_steps, snapshot_stride=vc.snapshot_stride,
                        include_gain=True)
    density_traj = evolve_density(rho0, spec, mcfg)
    oracle = density_traj.snapshots[-1].values

    diff = np.abs(averaged.mean.values - oracle)
    floor = ROUNDOFF_FLOOR * float(np.max(np.abs(oracle)))
    fraction = float(np.mean(diff <= DENSITY_TOL * averaged.stderr_field + floor))
    passed = fraction >= MIN_FRACTION
    return {
        "name": "density_equivalence",
        "passed": bool(passed),
        "n": vc.density_n_realizations,
        "fraction_within": fraction,
        "min_fraction": MIN_FRACTION,
        "stderr_units": DENSITY_TOL,
        "roundoff_floor": floor,
        "max_abs_difference": float(diff.max()),
        "averaged_trace_re": float(np.trace(averaged.mean.values).real * grid.dx),
        "master_trace_re": float(density_traj.trace[-1].real),
    }, density_traj


def run_verification(vc) -> VerificationResult:
    """Run the three cross-route criteria at the scales in vc.

    Also returns the effective trajectory and the gain-on density
    trajectory so callers can serialize the standard figure files from
    the same runs that fed the comparison.
    """
    grid = SpatialGrid(-vc.half_width, vc.half_width, vc.grid_points)
    n_steps = round(vc.t_final / vc.dt)
    evo_cfg = EvolutionConfig(dt=vc.dt, n_steps=n_steps, snapshot_stride=vc.snapshot_stride)
    psi0 = ground_state(grid, BENCH_MASS, BENCH_OMEGA)
    trajectory = evolve(psi0, _bench_spec(), evo_cfg, probes=vc.probes)

    criteria = [_characteristic_criterion(vc.master_seed)]
    criteria.append(_amplitude_criterion(vc, grid, evo_cfg, trajectory))
    density_report, density_traj = _density_criterion(vc)
    criteria.append(density_report)

    report = {
        "scenario": {
            "mass": BENCH_MASS,
            "omega": BENCH_OMEGA,
            "coupling_lambda": BENCH_LAMBDA,
            "sigma2": BENCH_SIGMA2,
            "t_final": vc.t_final,
            "dt": vc.dt,
        },
        "criteria": criteria,
        "all_passed": bool(all(c["passed"] for c in criteria)),
    }
    return VerificationResult(report, trajectory, density_traj)
