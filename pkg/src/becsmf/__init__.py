"""Simulator for a condensate coupled to light through single-mirror feedback.

The package integrates the full mirror-feedback dynamics, its non-local
cosine mean-field reduction, and the three-momentum-mode order-parameter
model, together with the droplet energetics, parameter sweeps and the
command-line front end.
"""

__version__ = "0.1.0"

from .core import DerivedParams, PhysParams, compute_chi0, compute_drive, compute_pth
from .spectral import Grid

__all__ = [
    "DerivedParams",
    "PhysParams",
    "Grid",
    "compute_chi0",
    "compute_drive",
    "compute_pth",
    "__version__",
]
