"""Three-momentum-mode reduction of the weakly driven instability.

Near threshold the wavefunction stays in the momenta 0 and +-1 (in
critical-wavenumber units), ``psi = c0 + c1*cos(theta)``.  The bilinears
``S = c0*conj(c1)`` and ``D = |c1|^2/2 - |c0|^2`` close on themselves:

    dS/dtau = i*S + i*(drive/2)*D*(S + conj(S))
    dD/dtau = -2*drive*Re(S)*Im(S)

with two exact first integrals, ``D^2 + 2|S|^2`` and ``D - drive*Re(S)^2``.
Started on the orbit through the homogeneous state, the magnetization
``M = Re(S)`` is a single symmetric pulse with a closed sech form, peak
``sqrt(2)*sqrt(drive-1)/drive`` and rate ``sqrt(drive-1)`` (recoil units).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyWarning, InvalidParameterError
from .spectral import Grid, fft_coeffs

MAX_STEP_TIMES_DRIVE = 0.1


@dataclass(frozen=True)
class ReducedState:
    """Order-parameter pair (S, D) plus the drive strength."""

    s: complex
    d: float
    drive: float

    def __post_init__(self):
        if self.drive <= 0:
            raise InvalidParameterError(f"drive must be positive, got {self.drive}")

    @property
    def m(self) -> float:
        """Magnetization of the reduced state (real part of S)."""
        return self.s.real

    def invariants(self) -> tuple[float, float]:
        """(D^2 + 2|S|^2, D - drive*Re(S)^2), both constant in time."""
        return (
            self.d**2 + 2.0 * abs(self.s) ** 2,
            self.d - self.drive * self.s.real**2,
        )


@dataclass(frozen=True)
class ReducedTrajectory:
    taus: np.ndarray
    s: np.ndarray
    d: np.ndarray
    drive: float

    @property
    def m(self) -> np.ndarray:
        return self.s.real

    def invariant_drift(self) -> tuple[float, float]:
        """Largest deviation of each first integral from its initial value."""
        inv1 = self.d**2 + 2.0 * np.abs(self.s) ** 2
        inv2 = self.d - self.drive * self.s.real**2
        return (
            float(np.max(np.abs(inv1 - inv1[0]))),
            float(np.max(np.abs(inv2 - inv2[0]))),
        )


def rhs(state: ReducedState) -> tuple[complex, float]:
    """Time derivatives (dS/dtau, dD/dtau)."""
    s, d, drive = state.s, state.d, state.drive
    ds = 1j * s + 0.5j * drive * d * (s + s.conjugate())
    dd = -2.0 * drive * s.real * s.imag
    return ds, dd


def _deriv(s: complex, d: float, drive: float) -> tuple[complex, float]:
    return (
        1j * s + 0.5j * drive * d * (s + s.conjugate()),
        -2.0 * drive * s.real * s.imag,
    )


def integrate(
    state0: ReducedState, dtau: float, n_steps: int, record_stride: int = 1
) -> ReducedTrajectory:
    """Fixed-step 4th-order integration of the reduced equations."""
    drive = state0.drive
    if abs(dtau) * drive >= MAX_STEP_TIMES_DRIVE:
        warnings.warn(
            f"dtau*drive = {abs(dtau) * drive:.3g} >= {MAX_STEP_TIMES_DRIVE}; "
            "the stated conservation accuracy is not guaranteed",
            AccuracyWarning,
            stacklevel=2,
        )
    s, d = complex(state0.s), float(state0.d)
    taus, s_vals, d_vals = [0.0], [s], [d]
    for k in range(1, n_steps + 1):
        k1s, k1d = _deriv(s, d, drive)
        k2s, k2d = _deriv(s + 0.5 * dtau * k1s, d + 0.5 * dtau * k1d, drive)
        k3s, k3d = _deriv(s + 0.5 * dtau * k2s, d + 0.5 * dtau * k2d, drive)
        k4s, k4d = _deriv(s + dtau * k3s, d + dtau * k3d, drive)
        s = s + (dtau / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        d = d + (dtau / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        if k % record_stride == 0 or k == n_steps:
            taus.append(k * dtau)
            s_vals.append(s)
            d_vals.append(d)
    return ReducedTrajectory(
        taus=np.asarray(taus),
        s=np.asarray(s_vals),
        d=np.asarray(d_vals),
        drive=drive,
    )


@dataclass(frozen=True)
class SechPulse:
    """Closed-form magnetization pulse seeded with M(0) = m0.

    ``amplitude`` never exceeds sqrt(2)/2 (reached at drive = 2); ``t0``
    is when the peak passes, positive for any seed below the amplitude.
    """

    amplitude: float
    rate: float                  # in recoil units
    t0: float
    m0: float

    def __call__(self, tau):
        out = self.amplitude / np.cosh(self.rate * (np.asarray(tau, float) - self.t0))
        return out if out.ndim else float(out)


def pulse(drive: float, m0: float) -> SechPulse:
    """Bundle amplitude, rate and peak time of the pulse for a given seed."""
    return SechPulse(
        amplitude=pulse_amplitude(drive),
        rate=pulse_rate(drive),
        t0=pulse_peak_time(drive, m0),
        m0=m0,
    )


def pulse_amplitude(drive: float) -> float:
    """Peak magnetization of the pulse, sqrt(2)*sqrt(drive-1)/drive."""
    if drive <= 1.0:
        raise InvalidParameterError(f"pulse exists only for drive > 1, got {drive}")
    return float(np.sqrt(2.0) * np.sqrt(drive - 1.0) / drive)


def pulse_rate(drive: float) -> float:
    """Growth rate of the instability, sqrt(drive-1), in recoil units."""
    if drive <= 1.0:
        raise InvalidParameterError(f"pulse exists only for drive > 1, got {drive}")
    return float(np.sqrt(drive - 1.0))


def pulse_peak_time(drive: float, m0: float) -> float:
    """Time at which a pulse seeded with M(0) = m0 reaches its peak."""
    amp = pulse_amplitude(drive)
    if not 0.0 < m0 < amp:
        raise InvalidParameterError(
            f"seed magnetization must lie in (0, {amp:.4g}), got {m0}"
        )
    return float(np.arccosh(amp / m0) / pulse_rate(drive))


def analytic_m(tau, drive: float, m0: float):
    """Closed-form magnetization pulse M(tau) for a seed M(0) = m0.

    Scalar in, scalar out; arrays broadcast.  The peak value
    ``pulse_amplitude(drive)`` is reached at ``pulse_peak_time(drive, m0)``.
    """
    return pulse(drive, m0)(tau)


def seeded_state(drive: float, m0: float, on_pulse: bool = True) -> ReducedState:
    """Near-homogeneous state with magnetization ``m0``.

    ``D`` is chosen so the parabolic first integral sits exactly at its
    homogeneous value -1.  With ``on_pulse`` the imaginary part of S is set
    so the spin-length integral is exactly 1 as well, which places the
    state on the sech pulse orbit; otherwise S is purely real, a turning
    point of M from which the pulse starts at rest.
    """
    if m0 <= 0:
        raise InvalidParameterError(f"seed must be positive, got {m0}")
    d = drive * m0**2 - 1.0
    if not on_pulse:
        return ReducedState(s=complex(m0), d=d, drive=drive)
    arg = (drive - 1.0) * m0**2 - 0.5 * drive**2 * m0**4
    if arg < 0.0:
        raise InvalidParameterError(
            f"seed {m0} exceeds the pulse amplitude for drive = {drive}"
        )
    return ReducedState(s=complex(m0, -np.sqrt(arg)), d=d, drive=drive)


@dataclass(frozen=True)
class Projection:
    """Two-state content of a wavefunction on a single-period grid."""

    c0: complex
    c1: complex
    s: complex
    d: float
    residual: float


def project_wavefunction(psi: np.ndarray, grid: Grid) -> Projection:
    """Project a wavefunction onto ``c0 + c1*cos(theta)``.

    ``c1`` collects the kappa = +-1 mode pair in the cosine basis; the
    residual is the fraction of the norm the ansatz does not capture
    (sine-quadrature first harmonic plus everything at |kappa| >= 2).
    """
    if grid.n_periods != 1:
        raise InvalidParameterError("two-state projection needs a single-period grid")
    coeffs = fft_coeffs(np.asarray(psi, dtype=complex))
    c0 = complex(coeffs[0])
    c1 = complex(coeffs[1] + coeffs[-1])
    total = float(np.sum(np.abs(coeffs) ** 2))
    captured = abs(c0) ** 2 + 0.5 * abs(c1) ** 2
    return Projection(
        c0=c0,
        c1=c1,
        s=c0 * c1.conjugate(),
        d=0.5 * abs(c1) ** 2 - abs(c0) ** 2,
        residual=max(0.0, 1.0 - captured / total),
    )
