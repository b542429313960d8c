"""Closed-form results for the harmonic oscillator with complex frequency.

Integrating a position-coupled Gaussian white noise out of the amplitude
evolution turns a harmonic oscillator of natural frequency omega into one
with complex frequency Omega = omega1 - i*omega2, Omega^2 = omega^2 -
i*lambda^2*sigma^2.  Everything that follows from that replacement in
closed form lives here: the propagator, the wavefunction seeded by a point
source, its large-time limit, lifetime and penetration-depth scales, the
condition for spatial localization, the resonance spectrum, coherent-state
uncertainty, and time-windowed eigenfunctions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermval

from .core import ComplexFrequency, OscillatorSpec

__all__ = [
    "CausticError",
    "ResonanceLevel",
    "complex_frequency",
    "ho_propagator",
    "point_source_psi",
    "asymptotic_psi",
    "localisation_scales",
    "localization_condition",
    "spectrum",
    "coherent_uncertainty",
    "timedep_eigenfunction",
    "stationary_eigenfunction",
]

CAUSTIC_TOL = 1e-12

WIDTH_CONVENTIONS = ("with_zero_point", "stable_ground")


class CausticError(ValueError):
    """Raised when sin(Omega*dt) vanishes (focal time of the lossless oscillator)."""


@dataclass(frozen=True)
class ResonanceLevel:
    """One oscillator level turned resonance: complex energy E_n = energy_re - i*width/2."""

    n: int
    energy_re: float
    width: float

    @property
    def lifetime(self) -> float:
        return np.inf if self.width == 0.0 else 1.0 / self.width


def complex_frequency(spec: OscillatorSpec) -> ComplexFrequency:
    """Square root of omega^2 - i*lambda^2*sigma^2 in the fourth quadrant.

    The radicand has non-negative real part and non-positive imaginary part,
    so the principal square root already satisfies omega1 >= 0, omega2 >= 0.
    """
    omega_sq = complex(spec.omega**2, -spec.lambda2_sigma2)
    root = np.sqrt(omega_sq)
    return ComplexFrequency(float(root.real), float(max(-root.imag, 0.0)))


def _log_sin_continued(omega: ComplexFrequency, t):
    """Branch of log sin(Omega*t) continuous in t > 0, principal as t -> 0+.

    Uses sin(z) = (e^{iz}/2i)(1 - e^{-2iz}); for omega2 > 0 the factor
    1 - e^{-2i*Omega*t} stays in the right half plane, so its principal log
    is continuous and the total winds smoothly with t.  For real Omega the
    expression jumps by i*pi across each focal time, which is exactly the
    quarter-phase drop the propagator prefactor must pick up there.
    """
    z = omega.value * np.asarray(t, dtype=np.complex128)
    return 1j * z - np.log(2.0) - 0.5j * np.pi + np.log(1.0 - np.exp(-2j * z))


def ho_propagator(m: float, omega: ComplexFrequency, x_to, x_from, dt) -> np.ndarray | complex:
    """Oscillator propagator amplitude from x_from to x_to over time dt > 0.

    Valid for real and complex frequency alike.  The square root of the
    prefactor follows the branch continued from the principal one at small
    dt; with any damping (omega2 > 0) sin(Omega dt) never vanishes and the
    continuation is unambiguous.
    """
    x_to = np.asarray(x_to, dtype=float)
    x_from = np.asarray(x_from, dtype=float)
    dt_arr = np.asarray(dt, dtype=float)
    if np.any(dt_arr <= 0):
        raise ValueError("propagation time dt must be positive")
    z = omega.value * dt_arr
    sin_z = np.sin(z)
    if np.any(np.abs(sin_z) < CAUSTIC_TOL):
        raise CausticError("sin(Omega*dt) vanishes: focal time of the undamped oscillator")
    log_pref = 0.5 * (
        np.log(m * omega.value) - 0.5j * np.pi - np.log(2.0 * np.pi) - _log_sin_continued(omega, dt_arr)
    )
    cot_z = np.cos(z) / sin_z
    phase = (0.5j * m * omega.value) * ((x_to**2 + x_from**2) * cot_z - 2.0 * x_to * x_from / sin_z)
    out = np.exp(log_pref + phase)
    return out if out.ndim else complex(out)


def point_source_psi(m: float, omega: ComplexFrequency, x, t) -> np.ndarray | complex:
    """Wavefunction at (x, t) of a particle created at the origin at t = 0.

    Evaluates the form with real and imaginary parts split in omega1 and
    omega2; identical to ho_propagator(m, omega, x, 0, t) by construction.
    """
    x = np.asarray(x, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("time must be positive")
    w1, w2 = omega.omega1, omega.omega2
    a = w1 * t_arr
    b = w2 * t_arr
    sin_z = np.sin(a) * np.cosh(b) - 1j * np.cos(a) * np.sinh(b)
    if np.any(np.abs(sin_z) < CAUSTIC_TOL):
        raise CausticError("sin(Omega*t) vanishes: focal time of the undamped oscillator")
    denom = np.sin(a) ** 2 * np.cosh(b) ** 2 + np.cos(a) ** 2 * np.sinh(b) ** 2
    coef = (w2 * np.sin(2 * a) - w1 * np.sinh(2 * b)) + 1j * (w1 * np.sin(2 * a) + w2 * np.sinh(2 * b))
    exponent = (m * x**2 / 4.0) * coef / denom
    log_pref = 0.5 * (
        np.log(m * omega.value) - 0.5j * np.pi - np.log(2.0 * np.pi) - _log_sin_continued(omega, t_arr)
    )
    out = np.exp(log_pref + exponent)
    return out if out.ndim else complex(out)


def asymptotic_psi(m: float, omega: ComplexFrequency, x, t) -> np.ndarray | complex:
    """Large-time limit of point_source_psi: a frozen Gaussian decaying in t.

    |psi|^2 falls like exp(-m*omega1*x^2) in space and exp(-omega2*t) in time.
    """
    x = np.asarray(x, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    pref = np.sqrt(m * omega.value / np.pi)
    out = pref * np.exp(
        -0.5j * omega.omega1 * t_arr
        - 0.5 * omega.omega2 * t_arr
        + 0.5 * m * x**2 * (-omega.omega1 + 1j * omega.omega2)
    )
    return out if np.ndim(out) else complex(out)


def localisation_scales(m: float, omega: ComplexFrequency):
    """(mean lifetime, penetration depth) = (2/omega2, sqrt(2/(m*omega1))).

    Either scale is inf when the corresponding frequency part vanishes.
    """
    tau = np.inf if omega.omega2 == 0.0 else 2.0 / omega.omega2
    depth = np.inf if omega.omega1 == 0.0 else float(np.sqrt(2.0 / (m * omega.omega1)))
    return tau, depth


def localization_condition(omega: ComplexFrequency, t):
    """True where the point-source density is spatially bound at time t.

    The Gaussian profile of |psi(x,t)|^2 has a negative x^2 log-coefficient
    exactly when omega2*sin(2*omega1*t) - omega1*sinh(2*omega2*t) < 0.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("time must be non-negative")
    expr = omega.omega2 * np.sin(2 * omega.omega1 * t_arr) - omega.omega1 * np.sinh(2 * omega.omega2 * t_arr)
    out = expr < 0
    return out if out.ndim else bool(out)


def spectrum(n: int, omega: ComplexFrequency, convention: str = "stable_ground") -> ResonanceLevel:
    """Resonance data of level n.

    convention selects the width rule: "with_zero_point" takes
    Gamma_n = (2n+1)*omega2, counting the half quantum of the ground state;
    "stable_ground" drops it, Gamma_n = 2n*omega2, so the ground state does
    not decay and higher widths are integer multiples of Gamma_1.
    """
    if n < 0:
        raise ValueError("level index must be non-negative")
    if convention not in WIDTH_CONVENTIONS:
        raise ValueError(f"unknown width convention {convention!r}")
    energy_re = (n + 0.5) * omega.omega1
    if convention == "with_zero_point":
        width = (2 * n + 1) * omega.omega2
    else:
        width = 2 * n * omega.omega2
    return ResonanceLevel(n=n, energy_re=energy_re, width=width)


def coherent_uncertainty(omega: ComplexFrequency) -> float:
    """Coherent-state product dx*dp in units of hbar: (1/2)*sqrt(1 + omega2^2/omega1^2)."""
    if omega.omega1 == 0.0:
        raise ValueError("uncertainty ratio undefined at omega1 = 0")
    return 0.5 * float(np.sqrt(1.0 + (omega.omega2 / omega.omega1) ** 2))


def stationary_eigenfunction(n: int, m: float, omega: ComplexFrequency, x) -> np.ndarray:
    """Hermite-type eigenfunction with complex width parameter m*Omega.

    Reduces to the usual oscillator eigenfunctions when omega2 = 0.  For
    omega2 > 0 these functions are not mutually orthogonal.
    """
    if n < 0:
        raise ValueError("level index must be non-negative")
    x = np.asarray(x, dtype=float)
    m_omega = m * omega.value
    scale = np.sqrt(m_omega)  # principal root
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    herm = hermval(scale * x.astype(np.complex128), coeffs)
    log_norm = 0.25 * np.log(m_omega / np.pi) - 0.5 * (n * np.log(2.0) + _log_factorial(n))
    return np.exp(log_norm - 0.5 * m_omega * x**2) * herm


def _log_factorial(n: int) -> float:
    return float(np.sum(np.log(np.arange(1, n + 1)))) if n > 1 else 0.0


def _time_norm_factor(n: int, omega2: float, interval: float) -> float:
    # unit L2 norm of the time factor over [0, T]: integral of N^2 e^{-2 w2 (n+1/2) t} dt = 1
    u = 2.0 * interval * omega2 * (n + 0.5)
    if u == 0.0:
        return float(np.sqrt(1.0 / interval))
    return float(np.sqrt(2.0 * omega2 * (n + 0.5) / (-np.expm1(-u))))


def timedep_eigenfunction(n: int, m: float, omega: ComplexFrequency, interval: float, x, t) -> np.ndarray | complex:
    """Eigenfunction n on the space-time window [0, interval].

    The spatial factor is stationary_eigenfunction; the time factor
    exp(-i*t*Omega*(n+1/2)) decays monotonically for omega2 > 0 and carries
    a prefactor that gives it unit L2 norm over the window.
    """
    if not 0.0 <= np.min(np.asarray(t)) or not np.max(np.asarray(t)) <= interval:
        raise ValueError("time must lie in [0, interval]")
    t_arr = np.asarray(t, dtype=float)
    pref = _time_norm_factor(n, omega.omega2, interval)
    time_factor = pref * np.exp(-1j * t_arr * omega.value * (n + 0.5))
    out = time_factor * stationary_eigenfunction(n, m, omega, x)
    return out if np.ndim(out) else complex(out)
