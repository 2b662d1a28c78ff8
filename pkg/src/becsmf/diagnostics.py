"""Observables and analytic cross-checks.

Magnetization is the modulus of the density's first-harmonic Fourier
coefficient at the pattern scale; it is the order parameter of the
self-structuring instability, zero for a homogeneous cloud and equal to
the modulation half-contrast for a weakly modulated one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FitFailureError, InvalidParameterError
from .spectral import Grid, fft_coeffs

GROWTH_WINDOW_LOW = 3.0     # fit starts once M exceeds this multiple of the seed
GROWTH_WINDOW_HIGH = 0.1    # and stops at this fraction of the peak


@dataclass(frozen=True)
class MagnetizationTrace:
    """Magnetization time series with optional harmonic amplitudes."""

    times: np.ndarray
    m: np.ndarray
    mode_amps: Optional[dict[int, np.ndarray]] = None


def trace_from_trajectory(traj) -> MagnetizationTrace:
    """Package a solver trajectory's observables for analysis."""
    return MagnetizationTrace(
        times=traj.taus,
        m=traj.m,
        mode_amps={1: np.abs(traj.n1), 2: np.abs(traj.n2)},
    )


@dataclass(frozen=True)
class GrowthFit:
    """Exponential growth rate fitted from a magnetization trace."""

    rate: float
    residual_rms: float
    window: tuple[float, float]
    n_points: int


@dataclass(frozen=True)
class ScatteringBudget:
    """Growth rate versus incoherent photon scattering at drive ``beta``.

    ``ratio`` evaluates the exact expression b0*R*sqrt(beta-1)/((1+R)*beta);
    ``ratio_strong`` and ``ratio_weak`` are its mirror-perfect asymptotic
    forms b0/(2*sqrt(beta)) and (b0/2)*sqrt(beta-1), and ``ratio_max`` is
    the exact value at beta = 2 where the ratio peaks.  ``r_s`` (scattering
    rate in linewidth units) is populated when ``omega_r`` is known.
    """

    beta: float
    growth_rate: float
    ratio: float
    ratio_strong: float
    ratio_weak: float
    ratio_max: float
    r_s: Optional[float] = None


def mode_amplitude(psi: np.ndarray, grid: Grid, kappa: float) -> complex:
    """Fourier coefficient of the density at wavenumber ``kappa``."""
    index = grid.mode_index(kappa)
    density = np.abs(np.asarray(psi)) ** 2
    return complex(fft_coeffs(density)[index])


def magnetization(psi: np.ndarray, grid: Grid) -> float:
    """Order parameter M = |first-harmonic coefficient of the density|.

    On a multi-period grid the coefficient is taken at the global
    pattern-scale mode (kappa = 1), i.e. averaged over the periods.
    """
    return abs(mode_amplitude(psi, grid, 1.0))


def growth_rate_fit(
    times: np.ndarray,
    m: np.ndarray,
    window: Optional[tuple[float, float]] = None,
    seed_level: Optional[float] = None,
) -> GrowthFit:
    """Least-squares slope of log M over the linear-growth window.

    Without an explicit ``window`` the fit spans from where M first
    exceeds 3x the seed level (default: the first sample) to where it
    first exceeds 10% of the trace maximum.  The windowed trace must be
    strictly positive and non-decreasing, otherwise the fit is refused.
    """
    times = np.asarray(times, dtype=float)
    m = np.asarray(m, dtype=float)
    if times.shape != m.shape or times.size < 5:
        raise FitFailureError("need matching time and magnetization arrays (>= 5 points)")
    if window is None:
        seed = float(m[0]) if seed_level is None else float(seed_level)
        if seed <= 0:
            raise FitFailureError("seed magnetization must be positive for auto-windowing")
        above = np.nonzero(m > GROWTH_WINDOW_LOW * seed)[0]
        cap = np.nonzero(m > GROWTH_WINDOW_HIGH * float(np.max(m)))[0]
        if above.size == 0 or cap.size == 0:
            raise FitFailureError("trace never leaves the seed level; nothing to fit")
        lo, hi = int(above[0]), int(cap[0])
        if hi <= lo + 3:
            raise FitFailureError(
                f"growth window [{lo}, {hi}] too short; "
                "increase the trace resolution or widen the horizon"
            )
        window = (float(times[lo]), float(times[hi]))
    mask = (times >= window[0]) & (times <= window[1])
    t_w, m_w = times[mask], m[mask]
    if t_w.size < 4:
        raise FitFailureError(f"window {window} holds {t_w.size} points; need >= 4")
    if np.any(m_w <= 0):
        raise FitFailureError("magnetization not strictly positive in the window")
    if np.any(np.diff(m_w) <= 0):
        raise FitFailureError("magnetization not monotone in the window")
    slope, intercept = np.polyfit(t_w, np.log(m_w), 1)
    resid = np.log(m_w) - (slope * t_w + intercept)
    return GrowthFit(
        rate=float(slope),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        window=(float(window[0]), float(window[1])),
        n_points=int(t_w.size),
    )


def scattering_ratio(
    beta: float, b0: float, R: float, omega_r: Optional[float] = None
) -> ScatteringBudget:
    """Growth-to-scattering budget of a run at drive ``beta`` = p0/p_th."""
    if beta <= 1.0:
        raise InvalidParameterError(
            f"the instability needs beta > 1, got {beta}"
        )
    if b0 <= 0 or not 0 < R <= 1:
        raise InvalidParameterError(f"bad optical parameters b0={b0}, R={R}")
    growth = float(np.sqrt(beta - 1.0))
    ratio = b0 * R * growth / ((1.0 + R) * beta)
    r_s = None
    if omega_r is not None:
        p_th = 2.0 * omega_r / (b0 * R)
        r_s = 0.5 * (1.0 + R) * beta * p_th
    return ScatteringBudget(
        beta=beta,
        growth_rate=growth,
        ratio=ratio,
        ratio_strong=b0 / (2.0 * np.sqrt(beta)),
        ratio_weak=0.5 * b0 * growth,
        ratio_max=b0 * R / (2.0 * (1.0 + R)),
        r_s=r_s,
    )
