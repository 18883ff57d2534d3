from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.constants import ev_to_angular_frequency
from app.core.errors import DomainError
from app.models.dielectric import DielectricKind


class DielectricModel(BaseModel):
    """Permittivity model on the imaginary frequency axis.

    Frequencies are stored in rad/s. Custom models carry a sampled table
    (xi strictly increasing, eps >= 1) that is interpolated log-log.
    """
    model_config = ConfigDict(frozen=True)

    kind: DielectricKind
    omega_p: float = Field(0.0, ge=0)
    gamma: float = Field(0.0, ge=0)
    xi_table: Tuple[float, ...] = ()
    eps_table: Tuple[float, ...] = ()
    label: Optional[str] = None

    @model_validator(mode="after")
    def check_parameters(self):
        if self.kind in (DielectricKind.PLASMA, DielectricKind.DRUDE) and self.omega_p <= 0:
            raise ValueError(f"{self.kind.value} model needs omega_p > 0")
        if self.kind == DielectricKind.CUSTOM:
            xi, eps = self.xi_table, self.eps_table
            if len(xi) < 2 or len(xi) != len(eps):
                raise ValueError("custom table needs at least two (xi, eps) rows")
            if any(b <= a for a, b in zip(xi, xi[1:])):
                raise ValueError("custom table xi column must be strictly increasing")
            if xi[0] <= 0:
                raise ValueError("custom table xi values must be positive")
            if any(v < 1 for v in eps):
                raise ValueError("custom table eps values must be >= 1")
        return self

    @classmethod
    def vacuum(cls) -> "DielectricModel":
        return cls(kind=DielectricKind.VACUUM)

    @classmethod
    def perfect_conductor(cls) -> "DielectricModel":
        return cls(kind=DielectricKind.PERFECT_CONDUCTOR)

    @classmethod
    def plasma(cls, omega_p: float, label: Optional[str] = None) -> "DielectricModel":
        if omega_p <= 0:
            raise DomainError(f"plasma frequency must be positive, got {omega_p}")
        return cls(kind=DielectricKind.PLASMA, omega_p=omega_p, label=label)

    @classmethod
    def drude(cls, omega_p: float, gamma: float, label: Optional[str] = None) -> "DielectricModel":
        if omega_p <= 0 or gamma < 0:
            raise DomainError(f"Drude needs omega_p > 0 and gamma >= 0, got {omega_p}, {gamma}")
        return cls(kind=DielectricKind.DRUDE, omega_p=omega_p, gamma=gamma, label=label)

    @classmethod
    def custom(cls, xi, eps, label: Optional[str] = None) -> "DielectricModel":
        try:
            return cls(
                kind=DielectricKind.CUSTOM,
                xi_table=tuple(float(v) for v in xi),
                eps_table=tuple(float(v) for v in eps),
                label=label,
            )
        except ValueError as exc:
            raise DomainError(str(exc)) from exc

    @property
    def is_perfect_conductor(self) -> bool:
        return self.kind == DielectricKind.PERFECT_CONDUCTOR

    @property
    def is_vacuum(self) -> bool:
        return self.kind == DielectricKind.VACUUM

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.kind == DielectricKind.PLASMA:
            return f"plasma(omega_p={self.omega_p:.6g})"
        if self.kind == DielectricKind.DRUDE:
            return f"drude(omega_p={self.omega_p:.6g},gamma={self.gamma:.6g})"
        return self.kind.value


class MaterialSpec(BaseModel):
    """Material as written in a run config: parameters in eV or rad/s, or a table path."""
    kind: DielectricKind
    omega_p_ev: Optional[float] = Field(None, ge=0)
    gamma_ev: Optional[float] = Field(None, ge=0)
    omega_p: Optional[float] = Field(None, ge=0, description="rad/s")
    gamma: Optional[float] = Field(None, ge=0, description="rad/s")
    table: Optional[str] = None

    @model_validator(mode="after")
    def check_fields(self):
        if self.kind in (DielectricKind.PLASMA, DielectricKind.DRUDE):
            if self.omega_p_ev is None and self.omega_p is None:
                raise ValueError("omega_p or omega_p_ev is required")
        if self.kind == DielectricKind.CUSTOM and not self.table:
            raise ValueError("custom material needs a table path")
        return self

    def plasma_frequency(self) -> float:
        if self.omega_p is not None:
            return self.omega_p
        return ev_to_angular_frequency(self.omega_p_ev or 0.0)

    def relaxation_frequency(self) -> float:
        if self.gamma is not None:
            return self.gamma
        return ev_to_angular_frequency(self.gamma_ev or 0.0)

    def to_model(self) -> DielectricModel:
        if self.kind == DielectricKind.VACUUM:
            return DielectricModel.vacuum()
        if self.kind == DielectricKind.PERFECT_CONDUCTOR:
            return DielectricModel.perfect_conductor()
        if self.kind == DielectricKind.PLASMA:
            return DielectricModel.plasma(self.plasma_frequency())
        if self.kind == DielectricKind.DRUDE:
            return DielectricModel.drude(self.plasma_frequency(), self.relaxation_frequency())
        from app.services.dielectric import load_permittivity_table
        return load_permittivity_table(self.table)
