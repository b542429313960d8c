"""Reproducible noise sampling and Monte Carlo averaging over realizations."""

import numpy as np
import pytest

from noisyqd import SpatialGrid, WaveFunction, norm2
from noisyqd.core import Schedule
from noisyqd.ensemble import (
    AveragedState,
    EnsembleConfig,
    average_amplitude,
    average_amplitude_sweep,
    average_density,
    noise_characteristic_check,
    sample_noise,
    trajectory_seed,
)
from noisyqd.master import purity, trace
from noisyqd.propagation import (
    EvolutionConfig,
    Harmonic,
    NumericsError,
    SystemSpec,
    TabulatedField,
    evolve,
    ground_state,
)

GRID = SpatialGrid(-8.0, 8.0, 256)
SPEC = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.3)
EVO = EvolutionConfig(dt=1e-2, n_steps=100)


# ---------------------------------------------------------- noise sampling


def test_sample_noise_is_deterministic_per_seed():
    cfg = EvolutionConfig(dt=1e-3, n_steps=50)
    a = sample_noise(7, cfg, 0.4)
    b = sample_noise(7, cfg, 0.4)
    c = sample_noise(8, cfg, 0.4)
    assert np.array_equal(a.increments, b.increments)
    assert not np.array_equal(a.increments, c.increments)
    assert a.increments.shape == (50,)
    assert np.all(a.variance_schedule == 0.4)


def test_sample_noise_variance_tracks_schedule_segments():
    # pooled per-segment variance must match the schedule mean over the
    # segment; 1e5 draws per segment puts the 2% band at > 4 sigma
    knots_t = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    knots_v = np.array([0.5, 0.5, 2.0, 2.0, 1.0])
    sched = Schedule.tabulated(knots_t, knots_v)
    dt = 1e-5
    cfg = EvolutionConfig(dt=dt, n_steps=400_000)
    nr = sample_noise(0, cfg, sched)
    t_mid = (np.arange(cfg.n_steps) + 0.5) * dt
    for k in range(4):
        sel = (t_mid >= k) & (t_mid < k + 1)
        sample_var = np.var(nr.increments[sel], ddof=1) / dt
        expected = np.mean(np.interp(t_mid[sel], knots_t, knots_v))
        assert sample_var == pytest.approx(expected, rel=0.02)


def test_sample_noise_whole_sample_statistics():
    cfg = EvolutionConfig(dt=0.01, n_steps=1_000_000)
    nr = sample_noise(2, cfg, 1.0)
    scaled = nr.increments / np.sqrt(0.01)
    assert 0.995 < np.var(scaled, ddof=1) < 1.005
    stderr = np.std(nr.increments, ddof=1) / np.sqrt(nr.n_steps)
    assert abs(np.mean(nr.increments)) < 4.0 * stderr


def test_sample_noise_uses_midpoint_of_schedule():
    sched = Schedule.tabulated(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    cfg = EvolutionConfig(dt=0.5, n_steps=2)
    nr = sample_noise(0, cfg, sched)
    assert np.allclose(nr.variance_schedule, [0.25, 0.75], rtol=0, atol=1e-12)


def test_trajectory_seed_streams_are_stable_and_distinct():
    a = np.random.default_rng(trajectory_seed(3, 5)).normal(size=4)
    b = np.random.default_rng(trajectory_seed(3, 5)).normal(size=4)
    c = np.random.default_rng(trajectory_seed(3, 6)).normal(size=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


# ---------------------------------------------------------- characteristic check


def test_characteristic_check_degenerate_point():
    out = noise_characteristic_check(0.0, 0.01, 1.0, 1.0, 1000)
    assert out["empirical"] == 1.0 + 0.0j
    assert out["exact"] == 1.0
    assert out["z"] == 0.0


def test_characteristic_check_matches_gaussian_formula():
    # oracle: E[exp(-i lam x W)] = exp(-lam^2 x^2 sigma^2 dt / 2)
    out = noise_characteristic_check(1.0, 0.01, 1.0, 1.0, 10**5, seed=0)
    assert out["exact"] == pytest.approx(np.exp(-0.005), rel=1e-12)
    assert out["z"] < 4.0


def test_characteristic_check_depends_on_x_and_dt_jointly():
    a = noise_characteristic_check(2.0, 0.01, 1.0, 1.0, 1000, seed=0)
    b = noise_characteristic_check(1.0, 0.04, 1.0, 1.0, 1000, seed=0)
    assert a["exact"] == pytest.approx(b["exact"], rel=1e-14)


def test_characteristic_check_requires_enough_draws():
    with pytest.raises(ValueError):
        noise_characteristic_check(1.0, 0.01, 1.0, 1.0, 999)


# ---------------------------------------------------------- amplitude averaging


def test_single_noiseless_trajectory_equals_effective_route():
    spec0 = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.0)
    avg = average_amplitude(ground_state(GRID), spec0, EVO, EnsembleConfig(1, master_seed=0))
    eff = evolve(ground_state(GRID), spec0, EVO)
    assert np.array_equal(avg.mean.values, eff.snapshots[-1].values)
    assert avg.n == 1
    assert np.all(avg.stderr_field == 0.0)


def test_averaging_is_bitwise_reproducible():
    cfg = EnsembleConfig(40, master_seed=9)
    a = average_amplitude(ground_state(GRID), SPEC, EVO, cfg)
    b = average_amplitude(ground_state(GRID), SPEC, EVO, cfg)
    assert np.array_equal(a.mean.values, b.mean.values)
    assert np.array_equal(a.stderr_field, b.stderr_field)


def test_result_independent_of_concurrency_setting():
    a = average_amplitude(ground_state(GRID), SPEC, EVO, EnsembleConfig(40, master_seed=9, max_concurrent=1))
    b = average_amplitude(ground_state(GRID), SPEC, EVO, EnsembleConfig(40, master_seed=9, max_concurrent=8))
    assert np.array_equal(a.mean.values, b.mean.values)


def test_sweep_checkpoints_agree_with_direct_runs():
    sweep = average_amplitude_sweep(ground_state(GRID), SPEC, EVO,
                                    EnsembleConfig(60, master_seed=4), counts=(30, 60))
    direct30 = average_amplitude(ground_state(GRID), SPEC, EVO, EnsembleConfig(30, master_seed=4))
    direct60 = average_amplitude(ground_state(GRID), SPEC, EVO, EnsembleConfig(60, master_seed=4))
    # the first checkpoint sees exactly the same partial sums
    assert np.array_equal(sweep[30].mean.values, direct30.mean.values)
    # later checkpoints may differ by summation order only (few ulp)
    scale = np.max(np.abs(direct60.mean.values))
    assert np.max(np.abs(sweep[60].mean.values - direct60.mean.values)) < 1e-13 * scale
    rerun = average_amplitude_sweep(ground_state(GRID), SPEC, EVO,
                                    EnsembleConfig(60, master_seed=4), counts=(30, 60))
    assert np.array_equal(sweep[60].mean.values, rerun[60].mean.values)


def test_stderr_shrinks_as_root_n():
    sweep = average_amplitude_sweep(ground_state(GRID), SPEC, EVO,
                                    EnsembleConfig(2000, master_seed=0), counts=(500, 2000))
    ratio = sweep[500].stderr_l2() / sweep[2000].stderr_l2()
    assert 1.5 < ratio < 2.5  # expect 2 when n quadruples


def test_mean_amplitude_approaches_effective_route():
    sweep = average_amplitude_sweep(ground_state(GRID), SPEC, EVO,
                                    EnsembleConfig(2000, master_seed=0), counts=(2000,))
    final = sweep[2000]
    eff = evolve(ground_state(GRID), SPEC, EVO)
    diff = final.mean.values - eff.snapshots[-1].values
    l2 = np.sqrt(np.sum(np.abs(diff) ** 2) * GRID.dx)
    assert l2 < 5.0 * final.stderr_l2()
    # every trajectory is unitary, but the mean loses norm like the
    # effective route does
    deficit = 1.0 - eff.norm2[-1]
    assert deficit > 0.0
    assert norm2(final.mean) < 1.0 - 0.5 * deficit


def test_requested_snapshots_accumulate_the_mean_field():
    evo = EvolutionConfig(dt=1e-2, n_steps=20, snapshot_stride=10)
    avg = average_amplitude(ground_state(GRID), SPEC, evo,
                            EnsembleConfig(25, master_seed=3), keep_snapshots=True)
    assert avg.snapshots is not None
    assert [s.time for s in avg.snapshots] == [0.0, pytest.approx(0.1), pytest.approx(0.2)]
    assert np.array_equal(avg.snapshots[-1].values, avg.mean.values)


# ---------------------------------------------------------- density averaging


def test_single_noiseless_density_is_a_pure_projector():
    spec0 = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.0)
    avg = average_density(ground_state(GRID), spec0, EVO, EnsembleConfig(1, master_seed=0))
    assert purity(avg.mean) == pytest.approx(1.0, abs=1e-8)
    eff = evolve(ground_state(GRID), spec0, EVO)
    v = eff.snapshots[-1].values
    outer = np.outer(v, v.conj())
    assert np.max(np.abs(avg.mean.values - outer)) < 1e-12 * np.max(np.abs(outer))


def test_averaged_density_keeps_unit_trace_and_hermiticity():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.3)
    avg = average_density(ground_state(g), spec, EvolutionConfig(dt=1e-2, n_steps=50),
                          EnsembleConfig(300, master_seed=1))
    assert trace(avg.mean).real == pytest.approx(1.0, abs=1e-10)
    assert abs(trace(avg.mean).imag) < 1e-12
    assert avg.mean.hermiticity_defect() < 1e-12


def test_averaged_density_purity_decreases_with_horizon():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.3)
    early = average_density(ground_state(g), spec, EvolutionConfig(dt=1e-2, n_steps=25),
                            EnsembleConfig(300, master_seed=1))
    late = average_density(ground_state(g), spec, EvolutionConfig(dt=1e-2, n_steps=100),
                           EnsembleConfig(300, master_seed=1))
    assert purity(late.mean) < purity(early.mean) < 1.0


def test_off_diagonal_coherence_decays_while_trace_persists():
    # dephasing damps fixed-separation off-diagonals, not the trace
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.5)
    offset = int(round(2.0 / g.dx))  # separation ~2 length units
    mags = []
    for steps in (25, 100):
        avg = average_density(ground_state(g), spec, EvolutionConfig(dt=1e-2, n_steps=steps),
                              EnsembleConfig(400, master_seed=2))
        mags.append(np.mean(np.abs(np.diagonal(avg.mean.values, offset=offset))))
        assert trace(avg.mean).real == pytest.approx(1.0, abs=1e-10)
    assert mags[1] < 0.85 * mags[0]


def test_density_averaging_is_bitwise_reproducible():
    g = SpatialGrid(-8.0, 8.0, 128)
    spec = SystemSpec(potential=Harmonic(1.0), coupling_lambda=1.0, sigma2=0.3)
    cfg = EnsembleConfig(30, master_seed=5)
    evo = EvolutionConfig(dt=1e-2, n_steps=25)
    a = average_density(ground_state(g), spec, evo, cfg)
    b = average_density(ground_state(g), spec, evo, cfg)
    assert np.array_equal(a.mean.values, b.mean.values)
    assert np.array_equal(a.stderr_field, b.stderr_field)


# ---------------------------------------------------------- failure handling


@pytest.mark.filterwarnings("ignore:invalid value")
def test_failing_trajectory_is_identified_by_index():
    g = SpatialGrid(-8.0, 8.0, 64)
    v = np.zeros(64)
    v[5] = np.inf
    spec = SystemSpec(potential=TabulatedField(v), coupling_lambda=1.0, sigma2=0.3)
    with pytest.raises(NumericsError, match="trajectory 0"):
        average_amplitude(ground_state(g), spec, EvolutionConfig(dt=1e-3, n_steps=3),
                          EnsembleConfig(4, master_seed=0))


def test_density_averaging_rejects_mixed_initial_state():
    # trajectories need a pure state; a proper mixture has no amplitude
    from noisyqd import DensityMatrix

    g = SpatialGrid(-8.0, 8.0, 64)
    a = ground_state(g, 1.0, 1.0).values
    b = ground_state(g, 1.0, 4.0).values
    mixed = 0.5 * np.outer(a, a.conj()) + 0.5 * np.outer(b, b.conj())
    rho = DensityMatrix(g, mixed)
    with pytest.raises(ValueError):
        average_density(rho, SPEC, EVO, EnsembleConfig(2, master_seed=0))
