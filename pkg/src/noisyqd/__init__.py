"""1D quantum dynamics driven by Gaussian white noise.

Three routes to the same physics, kept deliberately independent so they
can check each other:

* stochastic trajectories (unitary per noise path, Monte Carlo averaged),
* exact effective evolution under a complex potential,
* the noise-averaged density matrix with switchable loss/gain terms,

plus closed forms for the noisy harmonic oscillator: complex frequency,
propagator, point-source wavefunction, resonance widths and localization
scales.
"""

from .core import (
    ComplexFrequency,
    DensityMatrix,
    NoiseRealization,
    OscillatorSpec,
    Schedule,
    SpatialGrid,
    WaveFunction,
    expectation,
    norm2,
    probability_current,
)
from .oscillator import (
    CausticError,
    ResonanceLevel,
    WIDTH_CONVENTIONS,
    asymptotic_psi,
    coherent_uncertainty,
    complex_frequency,
    ho_propagator,
    localisation_scales,
    localization_condition,
    point_source_psi,
    spectrum,
    stationary_eigenfunction,
    timedep_eigenfunction,
)
from .propagation import (
    AbsorbingMask,
    EvolutionConfig,
    Harmonic,
    NumericsError,
    SoftCoulomb,
    SystemSpec,
    TabulatedField,
    Trajectory,
    effective_potential,
    evolve,
    gaussian_state,
    ground_state,
    step_effective,
    step_stochastic,
)
from .ensemble import (
    AveragedState,
    EnsembleConfig,
    average_amplitude,
    average_amplitude_sweep,
    average_density,
    noise_characteristic_check,
    sample_noise,
    trajectory_seed,
)
from .master import (
    DensityTrajectory,
    MasterConfig,
    evolve_density,
    liouville_step,
    purity,
    trace,
)
from .config import ConfigError, RunConfig, config_echo, load_config, parse_config
from .verify import run_verification

__version__ = "0.1.0"

__all__ = [
    "ComplexFrequency", "DensityMatrix", "NoiseRealization", "OscillatorSpec",
    "Schedule", "SpatialGrid", "WaveFunction", "expectation", "norm2",
    "probability_current",
    "CausticError", "ResonanceLevel", "WIDTH_CONVENTIONS", "asymptotic_psi",
    "coherent_uncertainty", "complex_frequency", "ho_propagator",
    "localisation_scales", "localization_condition", "point_source_psi",
    "spectrum", "stationary_eigenfunction", "timedep_eigenfunction",
    "AbsorbingMask", "EvolutionConfig", "Harmonic", "NumericsError",
    "SoftCoulomb", "SystemSpec", "TabulatedField", "Trajectory",
    "effective_potential", "evolve", "gaussian_state", "ground_state",
    "step_effective", "step_stochastic",
    "AveragedState", "EnsembleConfig", "average_amplitude",
    "average_amplitude_sweep", "average_density", "noise_characteristic_check",
    "sample_noise", "trajectory_seed",
    "DensityTrajectory", "MasterConfig", "evolve_density", "liouville_step",
    "purity", "trace",
    "ConfigError", "RunConfig", "config_echo", "load_config", "parse_config",
    "run_verification",
    "__version__",
]
