"""Density-matrix evolution with switchable loss and gain terms."""

import numpy as np
import pytest

from noisyqd import DensityMatrix, SpatialGrid
from noisyqd.master import (
    DensityTrajectory,
    MasterConfig,
    evolve_density,
    liouville_step,
    purity,
    trace,
)
from noisyqd.propagation import (
    EvolutionConfig,
    Harmonic,
    NumericsError,
    SystemSpec,
    TabulatedField,
    evolve,
    ground_state,
)


def projector(grid, psi_values):
    return DensityMatrix(grid, np.outer(psi_values, psi_values.conj()))


def ho_modes(grid, count):
    # orthonormal grid-supported states (discrete Gram-Schmidt on HO levels)
    from noisyqd import ComplexFrequency, stationary_eigenfunction

    om = ComplexFrequency(1.0, 0.0)
    basis = []
    for n in range(count):
        v = stationary_eigenfunction(n, 1.0, om, grid.x).astype(complex)
        for b in basis:
            v = v - b * np.vdot(b, v) * grid.dx
        v /= np.sqrt((np.vdot(v, v) * grid.dx).real)
        basis.append(v)
    return basis


# ---------------------------------------------------------- trace, purity


def test_pure_projector_has_unit_trace_and_purity():
    g = SpatialGrid(-8.0, 8.0, 128)
    rho = projector(g, ground_state(g).values)
    assert trace(rho).real == pytest.approx(1.0, abs=1e-10)
    assert purity(rho) == pytest.approx(1.0, abs=1e-8)


def test_equal_mixture_of_two_orthogonal_states_has_half_purity():
    g = SpatialGrid(-8.0, 8.0, 128)
    a, b = ho_modes(g, 2)
    rho = DensityMatrix(g, 0.5 * np.outer(a, a.conj()) + 0.5 * np.outer(b, b.conj()))
    assert trace(rho).real == pytest.approx(1.0, abs=1e-10)
    assert purity(rho) == pytest.approx(0.5, abs=1e-8)


def test_maximally_mixed_state_has_purity_one_over_d():
    g = SpatialGrid(-8.0, 8.0, 128)
    d = 5
    modes = ho_modes(g, d)
    vals = sum(np.outer(v, v.conj()) for v in modes) / d
    rho = DensityMatrix(g, vals)
    assert purity(rho) == pytest.approx(1.0 / d, abs=1e-6)


# ---------------------------------------------------------- single steps


def test_noiseless_step_conserves_trace_and_purity():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), sigma2=0.0)
    mcfg = MasterConfig(dt=1e-3, n_steps=1)
    rho = projector(g, ground_state(g).values)
    for _ in range(100):
        new = liouville_step(rho, spec, mcfg)
        assert abs(trace(new).real - trace(rho).real) < 1e-10
        assert abs(purity(new) - purity(rho)) < 1e-10
        rho = new


def test_gain_on_step_conserves_trace_exactly_on_diagonal():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.5)
    mcfg = MasterConfig(dt=1e-3, n_steps=1, include_gain=True)
    rho = projector(g, ground_state(g).values)
    for _ in range(50):
        new = liouville_step(rho, spec, mcfg)
        assert abs(trace(new).real - trace(rho).real) < 1e-10
        rho = new


def test_gain_off_trace_decay_matches_loss_generator():
    # finite-difference oracle: d(trace)/dt = -lam^2 sigma^2 sum x^2 rho_diag dx
    g = SpatialGrid(-8.0, 8.0, 256)
    l2s2 = 0.3
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=l2s2)
    mcfg = MasterConfig(dt=1e-3, n_steps=200, include_gain=False)
    rho0 = projector(g, ground_state(g).values)
    traj = evolve_density(rho0, spec, mcfg)
    tr = traj.trace.real
    deriv = (tr[1:] - tr[:-1]) / 1e-3
    x2_weight = np.einsum("tj,j->t", traj.diagonal, g.x**2) * g.dx
    expected = -l2s2 * 0.5 * (x2_weight[1:] + x2_weight[:-1])
    assert np.max(np.abs(deriv - expected) / np.abs(expected)) < 1e-3


def test_step_agrees_with_single_step_evolution():
    g = SpatialGrid(-8.0, 8.0, 96)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.4)
    mcfg = MasterConfig(dt=1e-3, n_steps=1)
    rho0 = projector(g, ground_state(g).values)
    direct = liouville_step(rho0, spec, mcfg)
    traj = evolve_density(rho0, spec, mcfg)
    assert np.array_equal(direct.values, traj.snapshots[-1].values)


# ---------------------------------------------------------- trajectories


def test_stationary_noiseless_state_keeps_all_observables():
    g = SpatialGrid(-8.0, 8.0, 256)
    spec = SystemSpec(potential=Harmonic(1.0), sigma2=0.0)
    rho0 = projector(g, ground_state(g).values)
    traj = evolve_density(rho0, spec, MasterConfig(dt=1e-3, n_steps=500))
    assert np.max(np.abs(traj.trace.real - 1.0)) < 1e-10
    assert np.max(np.abs(traj.purity - 1.0)) < 1e-10
    # the grid ground state is not an exact discrete eigenstate
    assert np.max(np.abs(traj.diagonal - traj.diagonal[0])) < 1e-7


def test_gain_on_trace_conservation_over_long_runs():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.2)
    rho0 = projector(g, ground_state(g).values)
    traj = evolve_density(rho0, spec, MasterConfig(dt=1e-3, n_steps=1000, include_gain=True))
    assert np.max(np.abs(traj.trace.real - 1.0)) < 1e-8
    assert np.max(np.abs(traj.trace.imag)) < 1e-10


def test_gain_off_trace_decays_monotonically():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.2)
    rho0 = projector(g, ground_state(g).values)
    traj = evolve_density(rho0, spec, MasterConfig(dt=1e-3, n_steps=500, include_gain=False))
    assert np.all(np.diff(traj.trace.real) < 0.0)
    assert traj.trace.real[-1] < 1.0


def test_gain_off_dynamics_factorizes_into_amplitude_evolutions():
    # loss-only evolution of a pure state stays an outer product of the
    # effective amplitude evolution with itself
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.4)
    psi0 = ground_state(g)
    rho0 = projector(g, psi0.values)
    steps = 500
    traj = evolve_density(rho0, spec, MasterConfig(dt=1e-3, n_steps=steps, include_gain=False))
    amp = evolve(psi0, spec, EvolutionConfig(dt=1e-3, n_steps=steps, snapshot_stride=steps))
    v = amp.snapshots[-1].values
    outer = np.outer(v, v.conj())
    assert np.max(np.abs(traj.snapshots[-1].values - outer)) < 1e-8


def test_purity_never_increases_in_the_dephasing_scenario():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.5)
    rho0 = projector(g, ground_state(g).values)
    traj = evolve_density(rho0, spec, MasterConfig(dt=1e-3, n_steps=1000, include_gain=True))
    assert np.all(np.diff(traj.purity) <= 1e-12)
    assert traj.purity[-1] < traj.purity[0]


def test_hermiticity_is_preserved_along_the_run():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.5)
    rho0 = projector(g, ground_state(g).values)
    traj = evolve_density(rho0, spec, MasterConfig(dt=1e-3, n_steps=200, snapshot_stride=50))
    for snap in traj.snapshots:
        assert snap.hermiticity_defect() < 1e-10


def test_frozen_kinetic_mode_reproduces_pure_dephasing():
    # closed form: |rho_t| = |rho_0| exp(-(lam^2 sigma^2 / 2) s^2 t) with
    # s = x_f - x_i; the static potential contributes only a phase
    g = SpatialGrid(-8.0, 8.0, 128)
    l2s2 = 0.5
    t = 1.0
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=l2s2)
    psi0 = ground_state(g)
    rho0 = projector(g, psi0.values)
    traj = evolve_density(rho0, spec,
                          MasterConfig(dt=1e-3, n_steps=1000, frozen_kinetic=True))
    got = traj.snapshots[-1].values
    s = g.x[:, None] - g.x[None, :]
    vdiff = 0.5 * (g.x[:, None] ** 2 - g.x[None, :] ** 2)
    expected = rho0.values * np.exp(-1j * vdiff * t) * np.exp(-0.5 * l2s2 * s**2 * t)
    floor = 1e-12 * np.max(np.abs(expected))
    keep = np.abs(expected) > floor
    rel = np.abs(got - expected)[keep] / np.abs(expected)[keep]
    assert np.max(rel) < 1e-10


def test_second_order_convergence_in_dt():
    g = SpatialGrid(-8.0, 8.0, 96)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.4)
    rho0 = projector(g, ground_state(g).values)
    t = 0.2

    def final(dt):
        traj = evolve_density(rho0, spec, MasterConfig(dt=dt, n_steps=round(t / dt)))
        return traj.snapshots[-1].values

    ref = final(t / 1600)
    err = [np.max(np.abs(final(t / n) - ref)) for n in (100, 200)]
    ratio = err[0] / err[1]
    assert 2.8 < ratio < 5.2  # second order: expect ~4


# ---------------------------------------------------------- validation


def test_initial_trace_must_be_unit():
    g = SpatialGrid(-8.0, 8.0, 64)
    rho = projector(g, ground_state(g).values)
    rho.values *= 1.5
    with pytest.raises(ValueError):
        evolve_density(rho, SystemSpec(potential=Harmonic(1.0)), MasterConfig(dt=1e-3, n_steps=5))


def test_non_hermitian_input_is_rejected():
    g = SpatialGrid(-8.0, 8.0, 64)
    rho = projector(g, ground_state(g).values)
    rho.values[3, 5] += 1e-3
    with pytest.raises(NumericsError, match="Hermiticity"):
        liouville_step(rho, SystemSpec(potential=Harmonic(1.0)), MasterConfig(dt=1e-3, n_steps=1))


@pytest.mark.filterwarnings("ignore:invalid value")
def test_non_finite_density_aborts_with_step_index():
    g = SpatialGrid(-8.0, 8.0, 64)
    v = np.zeros(64)
    v[10] = np.inf
    spec = SystemSpec(potential=TabulatedField(v), sigma2=0.0)
    rho0 = projector(g, ground_state(g).values)
    with pytest.raises(NumericsError, match="step"):
        evolve_density(rho0, spec, MasterConfig(dt=1e-3, n_steps=5))


def test_master_config_validation():
    with pytest.raises(ValueError):
        MasterConfig(dt=0.0, n_steps=5)
    with pytest.raises(ValueError):
        MasterConfig(dt=1e-3, n_steps=5, snapshot_stride=0)
