import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings


class QuadratureSpec(BaseModel):
    """Node counts and tolerances shared by the asymptotic and PFA engines."""
    model_config = ConfigDict(frozen=True)

    phi_nodes: int = Field(default_factory=lambda: settings.PHI_NODES, ge=4)
    t_nodes: int = Field(default_factory=lambda: settings.T_NODES, ge=4)
    s_max: int = Field(default_factory=lambda: settings.S_MAX, ge=1)
    rel_tol_leading: float = Field(default_factory=lambda: settings.REL_TOL_LEADING, gt=0)
    rel_tol_ntlo: float = Field(default_factory=lambda: settings.REL_TOL_NTLO, gt=0)
    refine: bool = True
    refine_factor: float = Field(1.5, gt=1)

    # log-graded panels for dissipative media
    graded_panels: int = Field(default_factory=lambda: settings.GRADED_PANELS, ge=1)
    panel_nodes: int = Field(default_factory=lambda: settings.PANEL_NODES, ge=2)

    # parallel-plate route
    u_nodes: int = Field(default_factory=lambda: settings.PFA_U_NODES, ge=4)
    w_nodes: int = Field(default_factory=lambda: settings.PFA_W_NODES, ge=4)
    v_nodes: int = Field(default_factory=lambda: settings.PFA_V_NODES, ge=4)
    max_depth: int = Field(default_factory=lambda: settings.PFA_MAX_DEPTH, ge=0)

    def refined(self) -> "QuadratureSpec":
        """Same spec with every node count scaled by refine_factor."""
        f = self.refine_factor
        return self.model_copy(update={
            "phi_nodes": int(round(self.phi_nodes * f)),
            "t_nodes": int(round(self.t_nodes * f)),
            "w_nodes": int(round(self.w_nodes * f)),
            "v_nodes": int(round(self.v_nodes * f)),
            "panel_nodes": int(round(self.panel_nodes * f)),
        })


class QuadratureOverrides(BaseModel):
    """Optional per-run overrides as read from a config file or CLI flags."""
    phi_nodes: Optional[int] = Field(None, ge=4)
    t_nodes: Optional[int] = Field(None, ge=4)
    s_max: Optional[int] = Field(None, ge=1)
    rel_tol_leading: Optional[float] = Field(None, gt=0)
    rel_tol_ntlo: Optional[float] = Field(None, gt=0)
    refine: Optional[bool] = None
    graded_panels: Optional[int] = Field(None, ge=1)
    panel_nodes: Optional[int] = Field(None, ge=2)
    u_nodes: Optional[int] = Field(None, ge=4)
    w_nodes: Optional[int] = Field(None, ge=4)
    v_nodes: Optional[int] = Field(None, ge=4)
    max_depth: Optional[int] = Field(None, ge=0)

    def apply(self, spec: Optional[QuadratureSpec] = None) -> QuadratureSpec:
        spec = spec or QuadratureSpec()
        return spec.model_copy(update=self.model_dump(exclude_none=True))


class TruncationSpec(BaseModel):
    """Multipole truncation and node counts of the exact round-trip evaluation."""
    model_config = ConfigDict(frozen=True)

    l_max: Optional[int] = Field(None, ge=1, description="None picks ceil(8 R/d) capped")
    xi_nodes: int = Field(default_factory=lambda: settings.ORACLE_XI_NODES, ge=8)
    theta_nodes: int = Field(default_factory=lambda: settings.ORACLE_THETA_NODES, ge=8)
    tolerance: float = Field(default_factory=lambda: settings.ORACLE_TOLERANCE, gt=0)
    l_max_cap: int = Field(default_factory=lambda: settings.ORACLE_L_MAX_CAP, ge=1)
    max_doublings: int = Field(3, ge=0)

    def resolved_l_max(self, e: float) -> int:
        if self.l_max is not None:
            return self.l_max
        return max(1, min(self.l_max_cap, math.ceil(8.0 / e)))
