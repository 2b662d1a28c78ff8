import numpy as np
import pytest

from becsmf.core import PhysParams
from becsmf.spectral import Grid

# Fig.-style operating points used across the suite.  With b0 = 100, R = 1
# and omega_r = 1e-8 the threshold pump intensity is exactly 2e-10.
P_TH = 2e-10


def weak_params(drive=1.1, delta=500.0):
    return PhysParams(b0=100, delta=delta, p0=drive * P_TH, R=1.0, omega_r=1e-8)


def strong_params():
    return PhysParams(b0=100, delta=500, p0=2e-9, R=1.0, omega_r=1e-8)


def droplet_params(p0=6.3e-8):
    return PhysParams(b0=20, delta=1600, p0=p0, R=0.99, omega_r=1e-7)


@pytest.fixture
def grid64():
    return Grid(64, 1)


@pytest.fixture
def grid128():
    return Grid(128, 1)


@pytest.fixture
def grid256():
    return Grid(256, 1)


def smooth_random_state(grid, amplitude=0.03, kmax=6, seed=3):
    """Unit-mean-density state with random low-harmonic content."""
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(grid.n_points, complex)
    coeffs[0] = 1.0
    for j in range(1, kmax + 1):
        coeffs[j] = amplitude * (rng.standard_normal() + 1j * rng.standard_normal())
        coeffs[-j] = amplitude * (rng.standard_normal() + 1j * rng.standard_normal())
    psi = np.fft.ifft(coeffs * grid.n_points)
    return psi / np.sqrt(np.mean(np.abs(psi) ** 2))
