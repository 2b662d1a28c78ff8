"""Full mirror-feedback solver with the exact nonlinear phase screen.

The cloud is optically thin: the pump picks up the phase profile of the
density, travels to the mirror and back, and diffraction over the round
trip converts the phase modulation into the intensity modulation that
pushes the atoms.  No small-susceptibility expansion is made anywhere, so
the feedback carries every density harmonic, not just the pattern-scale
one.  The mirror is treated as delay-free: the backward field is rebuilt
from the instantaneous density at every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import evolution
from .core import PhysParams
from .errors import GridMismatchError
from .spectral import Grid, diffraction_phase, fft_coeffs, ifft_coeffs


@dataclass(frozen=True)
class OpticalFields:
    """Transmitted forward field, backward field and saturation on a grid."""

    f_tr: np.ndarray
    b: np.ndarray
    s: np.ndarray


def transmitted_field(density: np.ndarray, params: PhysParams) -> np.ndarray:
    """Pump field after the cloud: sqrt(p0) * exp(-i * chi0 * density).

    A pure phase screen; the modulus stays sqrt(p0) everywhere.
    """
    return np.sqrt(params.p0) * np.exp(-1j * params.chi0 * np.asarray(density))


def backward_field(f_tr: np.ndarray, params: PhysParams, grid: Grid) -> np.ndarray:
    """Field returned by the mirror, mode by mode.

    Each Fourier component is scaled by sqrt(R) and rotated by the
    round-trip diffraction phase for its wavenumber.
    """
    if f_tr.shape != grid.theta.shape:
        raise GridMismatchError("forward field does not match the grid")
    kernel = np.sqrt(params.R) * diffraction_phase(grid.kappa)
    return ifft_coeffs(fft_coeffs(f_tr) * kernel)


def saturation(f_tr: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Total scaled light intensity seen by the atoms."""
    if f_tr.shape != b.shape:
        raise GridMismatchError("forward and backward fields differ in shape")
    return np.abs(f_tr) ** 2 + np.abs(b) ** 2


class SmfModel:
    """Potential builder for the full mirror-feedback dynamics."""

    name = "smf"

    def __init__(self, params: PhysParams, grid: Grid):
        self.params = params
        self.grid = grid
        self.chi0 = params.chi0
        self.sqrt_p0 = np.sqrt(params.p0)
        self._kernel = np.sqrt(params.R) * diffraction_phase(grid.kappa)
        # potential in recoil units: (delta/2) * s / omega_r with delta in
        # half-linewidths reads Delta/(4*omega_r) * s
        self._pot_coeff = params.delta / (4.0 * params.omega_r)

    def optical_fields(self, density: np.ndarray) -> OpticalFields:
        f_tr = self.sqrt_p0 * np.exp(-1j * self.chi0 * density)
        b = ifft_coeffs(fft_coeffs(f_tr) * self._kernel)
        return OpticalFields(f_tr=f_tr, b=b, s=self.params.p0 + np.abs(b) ** 2)

    def potential(self, density: np.ndarray) -> np.ndarray:
        return self._pot_coeff * self.optical_fields(density).s

    def intensity(self, density: np.ndarray) -> np.ndarray:
        return self.optical_fields(density).s


def step(psi: np.ndarray, params: PhysParams, grid: Grid, dtau: float) -> np.ndarray:
    """One Strang step of the mirror-feedback dynamics."""
    return evolution.step(SmfModel(params, grid), psi, dtau)


def evolve(
    psi0: np.ndarray,
    params: PhysParams,
    grid: Grid,
    dtau: float,
    n_steps: int,
    trace_stride: int = 10,
    snapshot_stride: int = 0,
) -> evolution.Trajectory:
    """Integrate the mirror-feedback dynamics from ``psi0``."""
    model = SmfModel(params, grid)
    return evolution.evolve(
        model, psi0, dtau, n_steps, trace_stride, snapshot_stride
    )
