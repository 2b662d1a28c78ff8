"""Shared split-step time evolution and the trajectory container.

Both solvers advance the wavefunction with second-order Strang splitting:
half a step of free dispersion in mode space, one full potential phase in
position space with the potential rebuilt from the half-step density, and
another half step of dispersion.  The models only differ in how the
potential is built from the density, which is what the ``model`` objects
passed in here encapsulate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyWarning, NumericsError
from .spectral import Grid, fft_coeffs, ifft_coeffs, kinetic_phase

# One potential phase per step should stay well under a radian for the
# splitting error to be in its asymptotic regime.
MAX_PHASE_PER_STEP = 0.5


@dataclass
class Trajectory:
    """Time series produced by a solver run.

    ``m`` is the magnetization (modulus of the first-harmonic density
    coefficient); ``n1``/``n2`` keep the complex first and second harmonic
    coefficients at the same sampling times.  Snapshots of the wavefunction
    and of the light intensity are stored at their own, usually coarser,
    stride.
    """

    model: str
    dtau: float
    taus: np.ndarray
    m: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    snap_taus: np.ndarray
    psi_snaps: np.ndarray
    s_snaps: np.ndarray
    max_norm_drift: float
    grid: Grid = field(repr=False)

    def peak(self) -> tuple[float, float]:
        """(tau, M) at the largest recorded magnetization."""
        i = int(np.argmax(self.m))
        return float(self.taus[i]), float(self.m[i])


def _mode_coeff(density: np.ndarray, phase: np.ndarray) -> complex:
    # mean(n * exp(-i*kappa*theta)): exact DFT coefficient for resolvable kappa
    return complex(np.mean(density * phase))


def step(model, psi: np.ndarray, dtau: float, warn: bool = True) -> np.ndarray:
    """One Strang step of ``model`` applied to position-space ``psi``."""
    half = kinetic_phase(model.grid, 0.5 * dtau)
    psi = ifft_coeffs(fft_coeffs(psi) * half)
    dens = np.abs(psi) ** 2
    pot = model.potential(dens)
    if warn:
        _check_phase(pot, dtau)
    psi = psi * np.exp(-1j * pot * dtau)
    return ifft_coeffs(fft_coeffs(psi) * half)


def _check_phase(pot: np.ndarray, dtau: float) -> bool:
    worst = float(np.max(np.abs(pot))) * dtau
    if worst > MAX_PHASE_PER_STEP:
        warnings.warn(
            f"potential phase {worst:.2f} rad per step exceeds "
            f"{MAX_PHASE_PER_STEP}; reduce dtau for trustworthy splitting",
            AccuracyWarning,
            stacklevel=3,
        )
        return True
    return False


def evolve(
    model,
    psi0: np.ndarray,
    dtau: float,
    n_steps: int,
    trace_stride: int = 10,
    snapshot_stride: int = 0,
) -> Trajectory:
    """Run ``n_steps`` Strang steps, recording traces and snapshots.

    The trace (magnetization and harmonic coefficients) is sampled every
    ``trace_stride`` steps including step 0; snapshots are taken every
    ``snapshot_stride`` steps if the stride is nonzero.  Raises
    :class:`NumericsError` as soon as a sampled state stops being finite.
    """
    grid = model.grid
    if dtau <= 0:
        raise NumericsError(f"dtau must be positive, got {dtau}")
    psi = np.asarray(psi0, dtype=complex).copy()
    half = kinetic_phase(grid, 0.5 * dtau)
    e1 = np.exp(-1j * grid.theta)
    e2 = np.exp(-2j * grid.theta)

    taus, m_vals, n1_vals, n2_vals = [], [], [], []
    snap_taus, psi_snaps, s_snaps = [], [], []
    max_drift = 0.0
    warned = False

    def sample(k: int):
        nonlocal max_drift
        if not np.all(np.isfinite(psi)):
            raise NumericsError(
                f"non-finite wavefunction at step {k} (tau = {k * dtau:.4g}); "
                f"last finite magnetization {m_vals[-1] if m_vals else 'n/a'}"
            )
        dens = np.abs(psi) ** 2
        if k % trace_stride == 0 or k == n_steps:
            n1 = _mode_coeff(dens, e1)
            taus.append(k * dtau)
            m_vals.append(abs(n1))
            n1_vals.append(n1)
            n2_vals.append(_mode_coeff(dens, e2))
            max_drift = max(max_drift, abs(float(np.mean(dens)) - 1.0))
        if snapshot_stride and k % snapshot_stride == 0:
            snap_taus.append(k * dtau)
            psi_snaps.append(psi.copy())
            s_snaps.append(model.intensity(dens))

    sample(0)
    for k in range(1, n_steps + 1):
        psi = ifft_coeffs(fft_coeffs(psi) * half)
        dens = np.abs(psi) ** 2
        pot = model.potential(dens)
        if not warned:
            warned = _check_phase(pot, dtau)
        psi *= np.exp(-1j * pot * dtau)
        psi = ifft_coeffs(fft_coeffs(psi) * half)
        if (k % trace_stride == 0 or k == n_steps
                or (snapshot_stride and k % snapshot_stride == 0)):
            sample(k)

    return Trajectory(
        model=model.name,
        dtau=dtau,
        taus=np.asarray(taus),
        m=np.asarray(m_vals),
        n1=np.asarray(n1_vals),
        n2=np.asarray(n2_vals),
        snap_taus=np.asarray(snap_taus),
        psi_snaps=np.asarray(psi_snaps) if psi_snaps else np.empty((0, grid.n_points), complex),
        s_snaps=np.asarray(s_snaps) if s_snaps else np.empty((0, grid.n_points)),
        max_norm_drift=max_drift,
        grid=grid,
    )
