"""Physical constants, unit conversions and dimensionless groups.

Values are CODATA 2018 (the exact SI definitions for hbar, c and the
elementary charge). Everything downstream works in dimensionless groups, so
the constants only enter when results are converted back to SI units.
"""
from typing import Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, computed_field
from scipy import constants as codata

from app.core.errors import DomainError


class PhysicalConstants(BaseModel):
    model_config = ConfigDict(frozen=True)

    hbar: float = codata.hbar
    c: float = codata.c
    ev_to_joule: float = codata.electron_volt

    @computed_field
    @property
    def hbar_c(self) -> float:
        return self.hbar * self.c


CONSTANTS = PhysicalConstants()


class DimensionlessGroups(BaseModel):
    """e = d/R and the per-medium plasma/relaxation groups."""
    model_config = ConfigDict(frozen=True)

    R: float
    d: float
    e: float
    omega_d: Tuple[float, ...]
    gamma_d: Tuple[float, ...]

    @computed_field
    @property
    def a(self) -> Tuple[Optional[float], ...]:
        # small expansion parameters of the perfect-conductor series
        return tuple(1.0 / w if w > 0 else None for w in self.omega_d)


def ev_to_angular_frequency(energy_ev: float) -> float:
    """Convert a photon energy in eV to an angular frequency in rad/s."""
    if energy_ev < 0:
        raise DomainError(f"energy must be non-negative, got {energy_ev}")
    return energy_ev * CONSTANTS.ev_to_joule / CONSTANTS.hbar


def dimensionless_groups(
    R: float,
    d: float,
    omega_p: Sequence[float] = (),
    gamma: Sequence[float] = (),
) -> DimensionlessGroups:
    if R <= 0 or d <= 0:
        raise DomainError(f"R and d must be positive, got R={R}, d={d}")
    if any(w < 0 for w in omega_p) or any(g < 0 for g in gamma):
        raise DomainError("plasma and relaxation frequencies must be non-negative")
    return DimensionlessGroups(
        R=R,
        d=d,
        e=d / R,
        omega_d=tuple(w * d / CONSTANTS.c for w in omega_p),
        gamma_d=tuple(g * d / CONSTANTS.c for g in gamma),
    )
