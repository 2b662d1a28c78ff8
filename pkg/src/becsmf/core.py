"""Dimensionless parameters of the mirror-feedback condensate system.

Unit conventions used throughout the package:

* all rates are stored as ratios to the atomic linewidth (``delta`` is the
  detuning in half-linewidths, ``omega_r`` is the recoil frequency over the
  linewidth);
* all times, including every solver step and output timestamp, are
  multiples of the inverse recoil frequency, so a timestamp ``tau`` equals
  ``omega_r * t``;
* lengths are measured in pattern phase ``theta = q_c * x``, one pattern
  period spanning ``2*pi``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import InvalidParameterError, RegimeWarning

TIME_UNIT = "1/omega_r"

# Susceptibility above which the cosine-interaction reduction of the full
# mirror model starts to pick up visible corrections.
CHI0_REGIME_LIMIT = 0.05


@dataclass(frozen=True)
class PhysParams:
    """Dimensionless inputs of a run.

    Attributes:
        b0: optical thickness of the cloud at resonance.
        delta: detuning in half-linewidths (2 * detuning / linewidth).
            The far-detuned model needs |delta| >> 1; values below 100
            trigger a RegimeWarning, values below 1 are rejected.
        p0: scaled pump intensity (saturation parameter of the pump).
        R: mirror reflectivity, in (0, 1].
        omega_r: recoil frequency as a fraction of the linewidth.
    """

    b0: float
    delta: float
    p0: float
    R: float
    omega_r: float

    def __post_init__(self):
        if not self.b0 > 0:
            raise InvalidParameterError(f"b0 must be positive, got {self.b0}")
        if self.delta == 0:
            raise InvalidParameterError("detuning must be nonzero")
        if abs(self.delta) < 1:
            raise InvalidParameterError(
                f"|delta| must be at least 1 (far-detuned model), got {self.delta}"
            )
        if not self.p0 > 0:
            raise InvalidParameterError(f"p0 must be positive, got {self.p0}")
        if not 0 < self.R <= 1:
            raise InvalidParameterError(f"R must be in (0, 1], got {self.R}")
        if not self.omega_r > 0:
            raise InvalidParameterError(
                f"omega_r must be positive, got {self.omega_r}"
            )
        if abs(self.delta) < 100:
            warnings.warn(
                f"|delta| = {abs(self.delta)} is small; the phase-only "
                "screen assumes strong detuning",
                RegimeWarning,
                stacklevel=2,
            )
        if abs(compute_chi0(self)) > CHI0_REGIME_LIMIT:
            warnings.warn(
                f"chi0 = {compute_chi0(self):.3g} exceeds {CHI0_REGIME_LIMIT}; "
                "the cosine-interaction reduction is only marginally valid",
                RegimeWarning,
                stacklevel=2,
            )

    @property
    def chi0(self) -> float:
        return compute_chi0(self)

    @property
    def p_th(self) -> float:
        return compute_pth(self)

    @property
    def drive(self) -> float:
        """Drive strength epsilon/omega_r = p0/p_th."""
        return compute_drive(self).drive


@dataclass(frozen=True)
class DerivedParams:
    """Constants derived from :class:`PhysParams`.

    ``drive`` is the single control parameter of the reduced model,
    equal to p0 / p_th; the homogeneous state destabilizes at drive = 1.
    """

    chi0: float
    p_th: float
    drive: float


def compute_chi0(params: PhysParams) -> float:
    """Susceptibility of the cloud, b0 / (2 * delta)."""
    if params.delta == 0:
        raise InvalidParameterError("detuning must be nonzero")
    return params.b0 / (2.0 * params.delta)


def compute_pth(params: PhysParams) -> float:
    """Instability threshold of the pump intensity, 2*omega_r/(b0*R)."""
    return 2.0 * params.omega_r / (params.b0 * params.R)


def compute_drive(params: PhysParams) -> DerivedParams:
    """All derived constants, populated consistently from ``params``."""
    p_th = compute_pth(params)
    return DerivedParams(
        chi0=compute_chi0(params),
        p_th=p_th,
        drive=params.p0 / p_th,
    )
