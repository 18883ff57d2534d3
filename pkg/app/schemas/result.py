from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.models.quantity import Kind, Method


class Diagnostics(BaseModel):
    """Quadrature bookkeeping attached to every computed value."""
    s_reached: Optional[int] = None
    tail_estimate: Optional[float] = None
    phi_nodes: Optional[int] = None
    t_nodes: Optional[int] = None
    error_estimate: Optional[float] = None
    l_max: Optional[int] = None
    l_max_trace: List[int] = []
    converged: bool = True
    notes: Dict[str, Any] = {}

    @classmethod
    def merged(cls, per_kind: Dict[str, "Diagnostics"]) -> "Diagnostics":
        """Worst case over several observables; each observable keeps its own entry in notes."""
        parts = list(per_kind.values())
        if not parts:
            return cls()
        if len(parts) == 1:
            return parts[0]

        def worst(field: str, key=None):
            present = [getattr(p, field) for p in parts if getattr(p, field) is not None]
            return max(present, key=key) if present else None

        return cls(
            s_reached=worst("s_reached"),
            tail_estimate=worst("tail_estimate", key=abs),
            phi_nodes=worst("phi_nodes"),
            t_nodes=worst("t_nodes"),
            error_estimate=worst("error_estimate"),
            l_max=worst("l_max"),
            l_max_trace=max((p.l_max_trace for p in parts), key=len),
            converged=all(p.converged for p in parts),
            notes={
                name: {
                    "s_reached": p.s_reached,
                    "tail_estimate": p.tail_estimate,
                    "error_estimate": p.error_estimate,
                    **p.notes,
                }
                for name, p in per_kind.items()
            },
        )


class ExpansionResult(BaseModel):
    """Leading and next-to-leading terms of one observable, SI units."""
    kind: Kind
    leading: float
    ntlo: float
    theta: float
    normalized_leading: float
    normalized_sum: float
    diagnostics: Diagnostics = Field(default_factory=Diagnostics)

    @property
    def total(self) -> float:
        return self.leading + self.ntlo


class KindValues(BaseModel):
    leading: Optional[float] = None
    ntlo: Optional[float] = None
    sum: Optional[float] = None
    normalized_leading: Optional[float] = None
    normalized_sum: Optional[float] = None
    theta: Optional[float] = None


class ResultRecord(BaseModel):
    """One output row: every requested observable at a single d."""
    d: float
    e: float
    method: Method
    material1: str
    material2: str
    energy: Optional[KindValues] = None
    force: Optional[KindValues] = None
    gradient: Optional[KindValues] = None
    failed: bool = False
    error: Optional[str] = None
    diagnostics: Diagnostics = Field(default_factory=Diagnostics)

    def values(self, kind: Kind) -> Optional[KindValues]:
        return getattr(self, Kind(kind).value)


class ComparisonRecord(BaseModel):
    d: float
    kind: Kind
    key: str
    value_a: Optional[float] = None
    value_b: Optional[float] = None
    ratio: Optional[float] = None
    difference: Optional[float] = None
