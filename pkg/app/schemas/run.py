from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from app.core.config import settings
from app.models.quantity import Method, OutputFormat, Quantity, Route
from app.schemas.material import MaterialSpec
from app.schemas.quadrature import QuadratureOverrides, TruncationSpec


class SweepSpec(BaseModel):
    """Separations from min to max (metres), log-spaced by default."""
    min: float = Field(..., gt=0)
    max: float = Field(..., gt=0)
    points: int = Field(..., ge=2)
    log: bool = True

    @model_validator(mode="after")
    def check_range(self):
        if self.min >= self.max:
            raise ValueError("sweep min must be smaller than max")
        return self

    def values(self) -> List[float]:
        if self.log:
            grid = np.geomspace(self.min, self.max, self.points)
        else:
            grid = np.linspace(self.min, self.max, self.points)
        return [float(v) for v in grid]


class OracleOptions(BaseModel):
    l_max: Optional[int] = Field(None, ge=1)
    converge: bool = False
    step: int = Field(10, ge=1)
    xi_nodes: Optional[int] = Field(None, ge=8)
    theta_nodes: Optional[int] = Field(None, ge=8)
    tolerance: Optional[float] = Field(None, gt=0)

    def truncation(self) -> TruncationSpec:
        return TruncationSpec(**self.model_dump(include={"l_max", "xi_nodes", "theta_nodes", "tolerance"}, exclude_none=True))


class OutputSpec(BaseModel):
    path: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV


class RunConfig(BaseModel):
    """A single computation or a sweep, as assembled from a config file and CLI flags."""
    quantity: Quantity = Quantity.ALL
    method: Method = Method.NTLO
    route: Route = Route.LIFSHITZ_INTEGRAL
    material1: MaterialSpec
    material2: MaterialSpec
    R: float = Field(..., gt=0)
    d: Optional[float] = Field(None, gt=0)
    sweep: Optional[SweepSpec] = None
    quadrature: QuadratureOverrides = Field(default_factory=QuadratureOverrides)
    oracle: OracleOptions = Field(default_factory=OracleOptions)
    output: OutputSpec = Field(default_factory=OutputSpec)
    jobs: int = Field(default_factory=lambda: settings.DEFAULT_JOBS, ge=0)

    @model_validator(mode="after")
    def check_separation(self):
        if (self.d is None) == (self.sweep is None):
            raise ValueError("give exactly one of d or a sweep")
        if self.method == Method.EXACT and self.quantity not in (Quantity.ENERGY, Quantity.ALL):
            raise ValueError("the exact method evaluates the energy only")
        return self

    def separations(self) -> List[float]:
        return [self.d] if self.d is not None else self.sweep.values()
