from pydantic import BaseModel, ConfigDict, Field, computed_field

from app.core.errors import DomainError


class Geometry(BaseModel):
    """Sphere of radius R at closest distance d above the plate (metres)."""
    model_config = ConfigDict(frozen=True)

    R: float = Field(..., gt=0)
    d: float = Field(..., gt=0)

    @computed_field
    @property
    def e(self) -> float:
        return self.d / self.R

    @computed_field
    @property
    def L(self) -> float:
        # distance from the sphere centre to the plate
        return self.d + self.R

    @classmethod
    def of(cls, R: float, d: float) -> "Geometry":
        if R <= 0 or d <= 0:
            raise DomainError(f"R and d must be positive, got R={R}, d={d}")
        return cls(R=R, d=d)
