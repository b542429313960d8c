"""Command-line entry point and on-disk serialization.

Subcommands: `noisyqd run <config>`, `noisyqd verify <config>`,
`noisyqd print-spec`.  Exit codes: 0 success, 2 config error, 3 numerical
failure, 4 verification failure.

Every run writes its tables (17 significant digits, fixed column order)
plus a summary.json embedding the resolved config and the seed, so a run
directory is self-describing and reproducible bit for bit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig, config_echo, config_schema, load_config
from .core import (
    ComplexFrequency,
    DensityMatrix,
    OscillatorSpec,
    WaveFunction,
    norm2,
    probability_current,
)
from .ensemble import average_amplitude, sample_noise, trajectory_seed
from .master import evolve_density
from .oscillator import (
    coherent_uncertainty,
    complex_frequency,
    localisation_scales,
    point_source_psi,
    spectrum,
)
from .propagation import (
    EvolutionConfig,
    Harmonic,
    NumericsError,
    SystemSpec,
    evolve,
    gaussian_state,
    ground_state,
)
from .verify import run_verification

__all__ = ["main"]


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _write_table(out_dir: str, name: str, fmt: str, columns, rows) -> str:
    """Write one table as CSV (17 significant digits) or JSON."""
    rows = [[float(v) for v in row] for row in rows]
    if fmt == "csv":
        path = os.path.join(out_dir, name + ".csv")
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    else:
        path = os.path.join(out_dir, name + ".json")
        with open(path, "w") as fh:
            json.dump({"columns": list(columns), "rows": rows}, fh)
            fh.write("\n")
    return os.path.basename(path)


def _heatmap_rows(times, grid, densities):
    for t, dens in zip(times, densities):
        for x, d in zip(grid.x, dens):
            yield (t, x, d)


def _current_rows(times, probes, currents):
    for k, t in enumerate(times):
        for j, px in enumerate(probes):
            yield (t, px, currents[k][j])


def _oscillator_scalars(omega: ComplexFrequency, mass: float) -> dict:
    tau, depth = localisation_scales(mass, omega)
    try:
        uncertainty = coherent_uncertainty(omega)
    except ValueError:
        uncertainty = None
    levels = range(5)
    return {
        "omega1": omega.omega1,
        "omega2": omega.omega2,
        "lifetime_tau": None if np.isinf(tau) else tau,
        "penetration_depth": None if np.isinf(depth) else depth,
        "uncertainty_product": uncertainty,
        "widths_with_zero_point": [spectrum(n, omega, "with_zero_point").width for n in levels],
        "widths_stable_ground": [spectrum(n, omega, "stable_ground").width for n in levels],
    }


def _grid_scalars(spec: SystemSpec) -> dict | None:
    if not isinstance(spec.potential, Harmonic) or not spec.sigma2.is_constant:
        return None
    osc = OscillatorSpec(mass=spec.mass, omega=spec.potential.omega,
                         coupling_lambda=spec.coupling_lambda,
                         sigma2=spec.sigma2.constant_value())
    return _oscillator_scalars(complex_frequency(osc), spec.mass)


def _initial_state(rc: RunConfig) -> WaveFunction:
    if rc.initial.kind == "gaussian":
        return gaussian_state(rc.grid, rc.initial.center, rc.initial.width, rc.initial.momentum)
    return ground_state(rc.grid, rc.system.mass, rc.system.potential.omega)


def _run_analytic(rc: RunConfig, out_dir: str) -> tuple[list, dict]:
    ana = rc.analytic
    omega = ComplexFrequency(ana.omega1, ana.omega2)
    times = ana.times()
    grid = rc.grid
    densities, norms, currents = [], [], []
    for t in times:
        psi = WaveFunction(grid, point_source_psi(ana.mass, omega, grid.x, t), t)
        densities.append(np.abs(psi.values) ** 2)
        norms.append(norm2(psi))
        if rc.probes:
            j_field = probability_current(psi)
            currents.append(np.interp(rc.probes, grid.x, j_field))
    files = [
        _write_table(out_dir, "psi2_heatmap", rc.outputs_format,
                     ("t", "x", "psi2"), _heatmap_rows(times, grid, densities)),
        _write_table(out_dir, "norm", rc.outputs_format,
                     ("t", "norm2"), zip(times, norms)),
    ]
    if rc.probes:
        files.append(_write_table(out_dir, "current", rc.outputs_format,
                                  ("t", "probe_x", "J_R"),
                                  _current_rows(times, rc.probes, currents)))
    return files, _oscillator_scalars(omega, ana.mass)


def _run_grid_mode(rc: RunConfig, out_dir: str) -> tuple[list, dict | None]:
    psi0 = _initial_state(rc)
    noise = None
    if rc.mode == "stochastic":
        noise = sample_noise(trajectory_seed(rc.master_seed(), 0), rc.evolution,
                             rc.system.sigma2, t0=psi0.time)
    traj = evolve(psi0, rc.system, rc.evolution, noise=noise, probes=rc.probes)
    snap_times = [s.time for s in traj.snapshots]
    files = [
        _write_table(out_dir, "psi2_heatmap", rc.outputs_format, ("t", "x", "psi2"),
                     _heatmap_rows(snap_times, rc.grid,
                                   [np.abs(s.values) ** 2 for s in traj.snapshots])),
        _write_table(out_dir, "norm", rc.outputs_format, ("t", "norm2"),
                     zip(traj.times, traj.norm2)),
    ]
    if rc.probes:
        files.append(_write_table(out_dir, "current", rc.outputs_format,
                                  ("t", "probe_x", "J_R"),
                                  _current_rows(traj.times, rc.probes, traj.probe_current)))
    return files, _grid_scalars(rc.system)


def _run_ensemble_mode(rc: RunConfig, out_dir: str) -> tuple[list, dict | None]:
    psi0 = _initial_state(rc)
    averaged = average_amplitude(psi0, rc.system, rc.evolution, rc.ensemble,
                                 keep_snapshots=True)
    snaps = averaged.snapshots
    snap_times = [s.time for s in snaps]
    files = [
        _write_table(out_dir, "psi2_heatmap", rc.outputs_format, ("t", "x", "psi2"),
                     _heatmap_rows(snap_times, rc.grid,
                                   [np.abs(s.values) ** 2 for s in snaps])),
        _write_table(out_dir, "norm", rc.outputs_format, ("t", "norm2"),
                     ((s.time, norm2(s)) for s in snaps)),
    ]
    if rc.probes:
        currents = [np.interp(rc.probes, rc.grid.x, probability_current(s)) for s in snaps]
        files.append(_write_table(out_dir, "current", rc.outputs_format,
                                  ("t", "probe_x", "J_R"),
                                  _current_rows(snap_times, rc.probes, currents)))
    scalars = _grid_scalars(rc.system) or {}
    scalars.update({"n_realizations": averaged.n, "stderr_l2": averaged.stderr_l2()})
    return files, scalars


def _run_master_mode(rc: RunConfig, out_dir: str) -> tuple[list, dict | None]:
    psi0 = _initial_state(rc)
    rho0 = DensityMatrix.from_pure(psi0)
    rho0.values /= np.trace(rho0.values).real * rc.grid.dx
    traj = evolve_density(rho0, rc.system, rc.master)
    stride = rc.master.snapshot_stride
    snap_idx = [k for k in range(len(traj.times))
                if k % stride == 0 or k == len(traj.times) - 1]
    files = [
        _write_table(out_dir, "trace_purity", rc.outputs_format,
                     ("t", "trace_re", "trace_im", "purity"),
                     ((traj.times[k], traj.trace[k].real, traj.trace[k].imag, traj.purity[k])
                      for k in range(len(traj.times)))),
        _write_table(out_dir, "psi2_heatmap", rc.outputs_format, ("t", "x", "psi2"),
                     _heatmap_rows([traj.times[k] for k in snap_idx], rc.grid,
                                   [traj.diagonal[k] for k in snap_idx])),
    ]
    return files, _grid_scalars(rc.system)


def _run_verify_mode(rc: RunConfig, out_dir: str) -> tuple[list, dict | None, bool]:
    result = run_verification(rc.verify)
    traj = result.trajectory
    dtraj = result.density_trajectory
    grid = traj.grid
    snap_times = [s.time for s in traj.snapshots]
    files = [
        _write_table(out_dir, "psi2_heatmap", rc.outputs_format, ("t", "x", "psi2"),
                     _heatmap_rows(snap_times, grid,
                                   [np.abs(s.values) ** 2 for s in traj.snapshots])),
        _write_table(out_dir, "norm", rc.outputs_format, ("t", "norm2"),
                     zip(traj.times, traj.norm2)),
        _write_table(out_dir, "current", rc.outputs_format, ("t", "probe_x", "J_R"),
                     _current_rows(traj.times, traj.probe_x, traj.probe_current)),
        _write_table(out_dir, "trace_purity", rc.outputs_format,
                     ("t", "trace_re", "trace_im", "purity"),
                     ((dtraj.times[k], dtraj.trace[k].real, dtraj.trace[k].imag, dtraj.purity[k])
                      for k in range(len(dtraj.times)))),
    ]
    report_path = os.path.join(out_dir, "verify_report.json")
    with open(report_path, "w") as fh:
        json.dump(result.report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    files.append(os.path.basename(report_path))
    scalars = {"all_passed": result.all_passed,
               "criteria_passed": [c["name"] for c in result.report["criteria"] if c["passed"]],
               "criteria_failed": [c["name"] for c in result.report["criteria"] if not c["passed"]]}
    return files, scalars, result.all_passed


def _execute(rc: RunConfig) -> int:
    out_dir = rc.outputs_dir
    os.makedirs(out_dir, exist_ok=True)
    verified_ok = True
    if rc.mode == "analytic":
        files, scalars = _run_analytic(rc, out_dir)
    elif rc.mode in ("effective", "stochastic"):
        files, scalars = _run_grid_mode(rc, out_dir)
    elif rc.mode == "ensemble":
        files, scalars = _run_ensemble_mode(rc, out_dir)
    elif rc.mode == "master":
        files, scalars = _run_master_mode(rc, out_dir)
    else:
        files, scalars, verified_ok = _run_verify_mode(rc, out_dir)

    summary = {
        "mode": rc.mode,
        "seed": rc.master_seed(),
        "config": config_echo(rc),
        "scalars": scalars,
        "files": files,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0 if verified_ok else 4


def _error_json(exc: Exception, exit_code: int) -> None:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc),
                         "exit_code": exit_code}}
    print(json.dumps(payload), file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="noisyqd",
        description="1D quantum evolution under Gaussian white noise: "
                    "stochastic trajectories, effective complex-potential "
                    "evolution and the averaged density matrix.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute the mode given in the config")
    p_run.add_argument("config", help="path to a JSON run configuration")
    p_ver = sub.add_parser("verify", help="run the cross-route verification suite")
    p_ver.add_argument("config", help="path to a JSON run configuration")
    sub.add_parser("print-spec", help="print the recognized config schema as JSON")
    args = parser.parse_args(argv)

    if args.command == "print-spec":
        json.dump(config_schema(), sys.stdout, indent=2)
        sys.stdout.write("\n")
        return 0

    try:
        rc = load_config(args.config)
        if args.command == "verify":
            rc.mode = "verify"
    except ConfigError as exc:
        _error_json(exc, 2)
        return 2

    try:
        return _execute(rc)
    except NumericsError as exc:
        _error_json(exc, 3)
        return 3
    except ConfigError as exc:
        _error_json(exc, 2)
        return 2
    except (ValueError, ArithmeticError) as exc:
        # numerics-phase failures (schedule window, overflow) surface here
        _error_json(exc, 3)
        return 3


if __name__ == "__main__":
    sys.exit(main())
