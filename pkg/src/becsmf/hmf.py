"""Mean-field solver with the non-local cosine interaction.

This is the reduced description of the mirror system: the light is
eliminated and the atoms interact through the pattern-scale potential
``Phi(theta) = Re(n1 * exp(i*theta))`` built from the first-harmonic
density coefficient ``n1`` alone.  The cosine kernel annihilates every
higher harmonic analytically, so ``Phi`` is computed from the ``kappa =
+-1`` mode pair and nothing else.  The equation of motion in recoil units
is ``i dpsi/dtau = -psi'' - drive * Phi * psi`` with drive = p0/p_th > 0
(the interaction is always attractive around a density bump).
"""

from __future__ import annotations

import numpy as np

from . import evolution
from .core import PhysParams
from .spectral import Grid, fft_coeffs


def nonlocal_potential(density: np.ndarray, grid: Grid) -> np.ndarray:
    """Cosine-kernel mean-field potential of a density profile.

    Returns ``A_c*cos(theta) + A_s*sin(theta)`` where the two amplitudes
    are the first-harmonic moments of the density per pattern period.
    """
    n1 = np.mean(density * np.exp(-1j * grid.theta))
    return n1.real * np.cos(grid.theta) - n1.imag * np.sin(grid.theta)


class HmfModel:
    """Potential builder for the cosine-interaction dynamics."""

    name = "hmf"

    def __init__(self, params: PhysParams, grid: Grid):
        self.params = params
        self.grid = grid
        self.drive = params.drive
        self._cos = np.cos(grid.theta)
        self._sin = np.sin(grid.theta)
        self._e1 = np.exp(-1j * grid.theta)

    def _phi(self, density: np.ndarray) -> np.ndarray:
        n1 = np.mean(density * self._e1)
        return n1.real * self._cos - n1.imag * self._sin

    def potential(self, density: np.ndarray) -> np.ndarray:
        return -self.drive * self._phi(density)

    def intensity(self, density: np.ndarray) -> np.ndarray:
        """Light intensity the potential corresponds to in the full model."""
        p = self.params
        return (1.0 + p.R) * p.p0 - 4.0 * p.R * p.p0 * p.chi0 * self._phi(density)


def energy(psi: np.ndarray, drive: float, grid: Grid) -> float:
    """Conserved mean-field energy per particle, in recoil units.

    Kinetic part plus half the interaction part; the half compensates the
    double counting of the symmetric pair interaction, so the value is
    constant along trajectories of the equation of motion.
    """
    coeffs = fft_coeffs(np.asarray(psi, dtype=complex))
    kinetic = float(np.sum(grid.kappa**2 * np.abs(coeffs) ** 2))
    density = np.abs(psi) ** 2
    n1 = complex(np.mean(density * np.exp(-1j * grid.theta)))
    return kinetic - 0.5 * drive * abs(n1) ** 2


def step(psi: np.ndarray, params: PhysParams, grid: Grid, dtau: float) -> np.ndarray:
    """One Strang step of the cosine-interaction dynamics."""
    return evolution.step(HmfModel(params, grid), psi, dtau)


def evolve(
    psi0: np.ndarray,
    params: PhysParams,
    grid: Grid,
    dtau: float,
    n_steps: int,
    trace_stride: int = 10,
    snapshot_stride: int = 0,
) -> evolution.Trajectory:
    """Integrate the cosine-interaction dynamics from ``psi0``."""
    model = HmfModel(params, grid)
    return evolution.evolve(
        model, psi0, dtau, n_steps, trace_stride, snapshot_stride
    )
