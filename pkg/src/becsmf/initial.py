"""Initial wavefunctions for the field solvers.

Every builder returns a position-space array whose mean density is
exactly 1 (renormalized after construction).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameterError
from .spectral import Grid


def _normalize(psi: np.ndarray) -> np.ndarray:
    return psi / np.sqrt(np.mean(np.abs(psi) ** 2))


def cosine_seed(
    grid: Grid,
    amplitude: float = 1e-3,
    phase: float = 0.0,
    noise_rms: float = 0.0,
    seed: int = 0,
) -> np.ndarray:
    """Homogeneous state with a small pattern-scale modulation.

    ``psi = 1 + amplitude * exp(i*phase) * cos(theta)`` plus, optionally,
    seeded complex white noise of the given rms on top.  ``phase`` rotates
    the seed in the complex plane (not along theta); see
    :func:`pulse_matched_phase` for the value that starts a clean
    magnetization pulse.
    """
    psi = 1.0 + amplitude * np.exp(1j * phase) * np.cos(grid.theta)
    if noise_rms > 0.0:
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(
            grid.n_points
        )
        noise -= noise.mean()
        noise *= noise_rms / np.sqrt(np.mean(np.abs(noise) ** 2))
        psi = psi + noise
    return _normalize(psi)


def gaussian_profile(
    grid: Grid, width: float, center: float | None = None
) -> np.ndarray:
    """Gaussian wavepacket of width ``sigma_x / Lambda_c = width``.

    ``width`` refers to the wavefunction profile exp(-theta^2/(2 sigma^2));
    the density profile is narrower by sqrt(2).  Centered mid-domain unless
    ``center`` (in theta) says otherwise.
    """
    if width <= 0:
        raise InvalidParameterError(f"width must be positive, got {width}")
    sigma = 2.0 * np.pi * width
    if center is None:
        center = np.pi * grid.n_periods
    return _normalize(np.exp(-((grid.theta - center) ** 2) / (2.0 * sigma**2)))


def pulse_matched_phase(drive: float) -> float:
    """Seed phase that puts the state on the rising magnetization pulse.

    A purely real seed starts at a turning point of M (dM/dtau = 0) and
    needs half a growth time before it joins the exponential branch; a seed
    rotated by arctan(sqrt(drive - 1)) starts directly on the pulse orbit,
    which is what the closed-form pulse profile describes.
    """
    if drive <= 1.0:
        raise InvalidParameterError(
            f"pulse-matched seed needs drive > 1, got {drive}"
        )
    return float(np.arctan(np.sqrt(drive - 1.0)))
