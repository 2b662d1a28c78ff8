"""Fourier machinery on the periodic pattern-scale grid.

Fields live on a uniform grid of ``theta = q_c * x`` covering an integer
number of pattern periods, so the domain length is ``2*pi*n_periods`` and
the resolvable wavenumbers (in units of the critical wavenumber) form the
ladder ``kappa = j / n_periods`` for integer ``j``.

Transforms use the Fourier-coefficient normalization: ``to_modes`` of a
constant field puts that constant in the ``kappa = 0`` slot, and
``cos(theta)`` maps to amplitude 1/2 at ``kappa = +-1``.  With the
position-space norm defined through the domain mean, Parseval's identity
is exact: ``mean(|f|^2) == sum(|F|^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, InvalidParameterError

MIN_POINTS_PER_PERIOD = 16


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid over ``n_periods`` pattern periods.

    ``theta`` holds the sample positions and ``kappa`` the mode
    wavenumbers in FFT layout (0, 1/n_periods, ..., negative half).
    """

    n_points: int
    n_periods: int = 1
    theta: np.ndarray = field(init=False, repr=False)
    kappa: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n, periods = self.n_points, self.n_periods
        if n < 2 or (n & (n - 1)) != 0:
            raise InvalidParameterError(f"n_points must be a power of two, got {n}")
        if periods < 1 or int(periods) != periods:
            raise InvalidParameterError(
                f"n_periods must be a positive integer, got {periods}"
            )
        if n // periods < MIN_POINTS_PER_PERIOD:
            raise InvalidParameterError(
                f"need at least {MIN_POINTS_PER_PERIOD} points per period, "
                f"got {n} points for {periods} periods"
            )
        length = 2.0 * np.pi * periods
        theta = np.arange(n) * (length / n)
        kappa = np.fft.fftfreq(n, d=1.0 / n) / periods
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "kappa", kappa)

    @property
    def length(self) -> float:
        return 2.0 * np.pi * self.n_periods

    def mode_index(self, kappa: float) -> int:
        """FFT index of the mode with wavenumber ``kappa``."""
        j = kappa * self.n_periods
        if abs(j - round(j)) > 1e-9:
            raise InvalidParameterError(
                f"kappa = {kappa} is not a multiple of 1/{self.n_periods}"
            )
        j = int(round(j))
        if not -self.n_points // 2 <= j < self.n_points // 2:
            raise InvalidParameterError(f"kappa = {kappa} is not resolvable")
        return j % self.n_points


@dataclass(frozen=True)
class SpectralField:
    """Complex samples over a :class:`Grid`, tagged position- or mode-space."""

    values: np.ndarray
    grid: Grid
    space: str = "position"

    def __post_init__(self):
        if self.space not in ("position", "modes"):
            raise InvalidParameterError(f"unknown representation {self.space!r}")
        if self.values.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"field has {self.values.shape[0]} samples for a grid of "
                f"{self.grid.n_points}"
            )


def position_field(values, grid: Grid) -> SpectralField:
    return SpectralField(np.asarray(values, dtype=complex), grid, "position")


def fft_coeffs(values: np.ndarray) -> np.ndarray:
    """Forward transform to Fourier coefficients (FFT layout)."""
    return np.fft.fft(values) / values.shape[0]


def ifft_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Synthesis from Fourier coefficients back to position samples."""
    return np.fft.ifft(coeffs) * coeffs.shape[0]


def to_modes(fld: SpectralField) -> SpectralField:
    if fld.space != "position":
        raise GridMismatchError("to_modes expects a position-space field")
    return SpectralField(fft_coeffs(fld.values), fld.grid, "modes")


def to_position(fld: SpectralField) -> SpectralField:
    if fld.space != "modes":
        raise GridMismatchError("to_position expects a mode-space field")
    return SpectralField(ifft_coeffs(fld.values), fld.grid, "position")


def norm(fld: SpectralField) -> float:
    """Parseval-consistent 2-norm (domain mean in position space)."""
    if fld.space == "position":
        return float(np.sqrt(np.mean(np.abs(fld.values) ** 2)))
    return float(np.sqrt(np.sum(np.abs(fld.values) ** 2)))


def kinetic_phase(grid: Grid, dtau: float) -> np.ndarray:
    """Free-evolution multipliers exp(-i*kappa^2*dtau) in FFT layout."""
    return np.exp(-1j * grid.kappa**2 * dtau)


def kinetic_propagator(fld: SpectralField, dtau: float) -> SpectralField:
    """Advance a mode-space field through ``dtau`` of free dispersion."""
    if fld.space != "modes":
        raise GridMismatchError("kinetic_propagator expects a mode-space field")
    return SpectralField(
        fld.values * kinetic_phase(fld.grid, dtau), fld.grid, "modes"
    )


def diffraction_phase(kappa):
    """Unit-modulus phase picked up by mode ``kappa`` on the mirror round trip.

    The mirror distance is fixed at the value that makes the critical modes
    ``kappa = +-1`` pick up a quarter-wave phase, so a pure phase modulation
    at the pattern scale returns as the amplitude modulation that reinforces
    it.  The sign convention matches the phase screen in :mod:`becsmf.smf`:
    together they turn a density bump into a potential well.
    """
    kappa = np.asarray(kappa, dtype=float)
    out = np.exp(-0.5j * np.pi * kappa**2)
    return out if out.ndim else complex(out)
