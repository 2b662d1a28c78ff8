"""Self-bound droplet energetics and width extraction.

Width conventions: ``sigma`` is the Gaussian width of the wavefunction
profile exp(-theta^2/(2 sigma^2)) in theta units; physical widths are
quoted as sigma_x / Lambda_c = sigma / (2*pi).  The density profile of
such a droplet is narrower by sqrt(2), which matters when fitting
simulated densities (:func:`fit_width` reports the width of the profile
it is given; scan rows convert back to the wavefunction convention).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit, minimize_scalar
from scipy.signal import find_peaks

from . import smf
from .core import PhysParams
from .errors import FitFailureError, InvalidParameterError, RegimeWarning
from .initial import gaussian_profile
from .spectral import Grid

TWO_PI = 2.0 * np.pi

# Width (in theta) below which the single-well droplet description holds.
NARROW_LIMIT = np.sqrt(2.0)


def energy(sigma: float, drive: float, form: str = "exact") -> float:
    """Gaussian-droplet energy per particle in recoil units.

    ``exact``: 1/(2 sigma^2) - drive * exp(-sigma^2/2), the kinetic cost
    against the self-generated pattern-scale well.  ``quadratic``: its
    narrow-droplet expansion 1/(2 sigma^2) - drive + drive*sigma^2/2,
    whose stationary point is the closed-form width.
    """
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    if form == "exact":
        return 1.0 / (2.0 * sigma**2) - drive * np.exp(-(sigma**2) / 2.0)
    if form == "quadratic":
        return 1.0 / (2.0 * sigma**2) - drive + 0.5 * drive * sigma**2
    raise InvalidParameterError(f"unknown energy form {form!r}")


@dataclass(frozen=True)
class OptimalWidth:
    """Closed-form and numerically minimized droplet widths."""

    sigma_closed: float          # theta units, drive**(-1/4)
    sigma_numeric: float         # theta units, minimum of the exact energy
    width_closed: float          # sigma_x / Lambda_c
    width_numeric: float
    narrow_valid: bool           # sigma small enough for the expansion


def optimal_sigma(drive: float) -> OptimalWidth:
    """Stationary droplet width from the Gaussian energy.

    The closed form drive**(-1/4) extremizes the quadratic energy; the
    numeric value minimizes the exact form by bounded 1-D search.  Below
    drive = 1 the droplet is not predicted to be narrow and a regime
    warning is issued.
    """
    if drive <= 0:
        raise InvalidParameterError(f"drive must be positive, got {drive}")
    if drive <= 1.0:
        warnings.warn(
            f"drive = {drive} is not above threshold; no narrow droplet regime",
            RegimeWarning,
            stacklevel=2,
        )
    sigma_closed = drive ** (-0.25)
    res = minimize_scalar(
        energy, bounds=(0.02, 3.0), args=(drive,), method="bounded",
        options={"xatol": 1e-10},
    )
    sigma_numeric = float(res.x)
    return OptimalWidth(
        sigma_closed=sigma_closed,
        sigma_numeric=sigma_numeric,
        width_closed=sigma_closed / TWO_PI,
        width_numeric=sigma_numeric / TWO_PI,
        narrow_valid=sigma_closed < NARROW_LIMIT,
    )


def _gaussian(theta, base, amp, center, width):
    return base + amp * np.exp(-((theta - center) ** 2) / (2.0 * width**2))


def _fit_gaussian(density: np.ndarray, grid: Grid):
    """Shared peak checks and least-squares fit; returns (popt, residual)."""
    density = np.asarray(density, dtype=float)
    if density.shape != grid.theta.shape:
        raise FitFailureError("density does not match the grid")
    lo, hi = float(density.min()), float(density.max())
    mean = float(density.mean())
    if hi - lo < 1e-3 * max(mean, 1e-300):
        raise FitFailureError("no peak: density is flat to 0.1%")
    peaks, _ = find_peaks(
        density, height=lo + 0.5 * (hi - lo), distance=max(2, grid.n_points // 8)
    )
    n_peaks = len(peaks)
    # a maximum at sample 0 is not reported by find_peaks; wrap-check it
    if density[0] > lo + 0.5 * (hi - lo) and density[0] >= density[1] and density[0] >= density[-1]:
        n_peaks += 1
    if n_peaks > 1:
        raise FitFailureError(f"{n_peaks} separated peaks; expected a single droplet")
    guess = (lo, hi - lo, float(grid.theta[np.argmax(density)]), 0.3)
    try:
        popt, _ = curve_fit(_gaussian, grid.theta, density, p0=guess, maxfev=20000)
    except RuntimeError as exc:
        raise FitFailureError(f"Gaussian fit did not converge: {exc}") from exc
    resid = density - _gaussian(grid.theta, *popt)
    rel = float(np.sqrt(np.mean(resid**2)) / (hi - lo))
    if rel > 0.2:
        raise FitFailureError(f"Gaussian fit residual {rel:.2f} of contrast; not a droplet")
    return popt, rel


def fit_width(density: np.ndarray, grid: Grid) -> float:
    """Gaussian width of a single-peaked density, in pattern periods.

    Least-squares fit of baseline + amplitude * Gaussian; returns the
    fitted Gaussian width over 2*pi.  Refuses flat profiles and profiles
    with more than one well-separated peak.
    """
    popt, _ = _fit_gaussian(density, grid)
    return abs(float(popt[3])) / TWO_PI


@dataclass(frozen=True)
class ScanRow:
    """One pump intensity of a droplet width scan.

    ``width_variation`` is the rms fluctuation of the per-snapshot widths
    about their median (the droplet breathes; this is the size of the
    breathing), and ``width_excursion`` the single largest relative
    excursion over the window.
    """

    p0: float
    drive: float
    sigma_fit: float             # wavefunction width, sigma_x / Lambda_c
    sigma_closed: float          # closed-form prediction, same units
    width_variation: float       # rms of (w - median) / median
    width_excursion: float       # max |w - median| / median
    fit_residual: float
    chi0_n_peak: float
    mapping_valid: bool
    error: str = ""


def scan_row(
    params: PhysParams,
    *,
    n_points: int = 256,
    t_end: float = 40.0,
    dtau: Optional[float] = None,
    init_width: Optional[float] = None,
    snapshot_tau: float = 0.25,
    transient_fraction: float = 0.2,
    protocol: str = "median",
) -> ScanRow:
    """Evolve one droplet and measure its width.

    The run starts from a Gaussian at the closed-form width (or
    ``init_width``), discards the first ``transient_fraction`` of the
    snapshots and reports the median of per-snapshot width fits
    (``protocol='median'``) or the width of the time-averaged density
    (``protocol='averaged'``).  Widths are wavefunction-profile widths in
    pattern periods.  The step size is capped so the potential phase per
    step stays below the splitting-accuracy bound.
    """
    grid = Grid(n_points, 1)
    drive = params.drive
    closed = optimal_sigma(drive).width_closed
    width0 = closed if init_width is None else init_width
    if dtau is None:
        pot_scale = abs(params.delta) / (4.0 * params.omega_r) * (1.0 + params.R) * params.p0
        dtau = min(5e-4, 0.4 / (1.2 * pot_scale))
    psi0 = gaussian_profile(grid, width0)
    snap_stride = max(1, int(round(snapshot_tau / dtau)))
    traj = smf.evolve(
        psi0, params, grid, dtau=dtau, n_steps=int(t_end / dtau),
        trace_stride=10 * snap_stride, snapshot_stride=snap_stride,
    )
    k0 = int(transient_fraction * len(traj.psi_snaps))
    densities = np.abs(traj.psi_snaps[k0:]) ** 2
    if len(densities) < 4:
        raise FitFailureError("not enough snapshots after the transient window")
    widths, resids = [], []
    for dens in densities:
        popt, rel = _fit_gaussian(dens, grid)
        widths.append(np.sqrt(2.0) * abs(float(popt[3])) / TWO_PI)
        resids.append(rel)
    widths = np.asarray(widths)
    med = float(np.median(widths))
    variation = float(np.sqrt(np.mean((widths - med) ** 2)) / med)
    excursion = float(np.max(np.abs(widths - med)) / med)
    if protocol == "averaged":
        sigma_fit = float(np.sqrt(2.0) * fit_width(densities.mean(axis=0), grid))
    elif protocol == "median":
        sigma_fit = med
    else:
        raise InvalidParameterError(f"unknown scan protocol {protocol!r}")
    chi0_n_peak = float(abs(params.chi0) * max(float(d.max()) for d in densities))
    return ScanRow(
        p0=params.p0,
        drive=drive,
        sigma_fit=sigma_fit,
        sigma_closed=closed,
        width_variation=variation,
        width_excursion=excursion,
        fit_residual=float(np.median(resids)),
        chi0_n_peak=chi0_n_peak,
        mapping_valid=chi0_n_peak <= 0.5,
    )


def _scan_one(args) -> ScanRow:
    p0, base_params, row_options = args
    params = replace(base_params, p0=float(p0))
    try:
        return scan_row(params, **row_options)
    except Exception as exc:  # keep scanning; the row records the failure
        return ScanRow(
            p0=float(p0), drive=params.drive, sigma_fit=float("nan"),
            sigma_closed=optimal_sigma(params.drive).width_closed,
            width_variation=float("nan"), width_excursion=float("nan"),
            fit_residual=float("nan"), chi0_n_peak=float("nan"),
            mapping_valid=False, error=f"{type(exc).__name__}: {exc}",
        )


def droplet_scan(
    p0_list: Sequence[float],
    base_params: PhysParams,
    workers: int = 1,
    **row_options,
) -> list[ScanRow]:
    """Width scan over pump intensities; failures are recorded per row.

    Rows are independent deterministic runs, so a worker pool changes the
    wall time and nothing else; results come back ordered by p0.
    """
    jobs = [(float(p0), base_params, row_options) for p0 in p0_list]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_one, jobs))
    else:
        rows = [_scan_one(job) for job in jobs]
    rows.sort(key=lambda r: r.p0)
    if rows and all(r.error for r in rows):
        raise FitFailureError("every scan row failed; see per-row errors")
    return rows
