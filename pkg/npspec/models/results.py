# npspec/models/results.py
import math
from typing import Any

from pydantic import BaseModel, Field, field_validator


class PlasmonValue(BaseModel):
    """A plasmonic eigenvalue: the permittivity ratio of a resonant transmission problem."""

    epsilon: float = Field(
        ...,
        allow_inf_nan=False,
        description="Dimensionless permittivity ratio."
    )

    @field_validator("epsilon")
    @classmethod
    def reject_pole(cls, v: float) -> float:
        if v == -1.0:
            raise ValueError("epsilon = -1 has no NP counterpart")
        return v


class ZetaResult(BaseModel):
    """Truncated spectral zeta sum of the sphere with a rigorous tail bound."""

    p: float = Field(..., gt=2.0, description="Exponent.")
    k_max: int = Field(..., ge=0, description="Last degree included in the partial sum.")
    partial_sum: float = Field(..., description="Sum over degrees 0..k_max.")
    tail_bound: float = Field(..., ge=0.0, description="Upper bound on the omitted tail.")
    estimate: float = Field(..., description="Partial sum plus the midpoint tail estimate.")

    @field_validator("partial_sum", "tail_bound", "estimate")
    @classmethod
    def finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("zeta sums must be finite")
        return v


class Report(BaseModel):
    """Tabular result of one command run, shared by the CLI writer and the HTTP routes."""

    command: str = Field(..., description="Command that produced the report.")
    summary: dict[str, Any] = Field(default_factory=dict, description="Scalar results.")
    columns: list[str] = Field(..., description="Fixed column order of the rows.")
    rows: list[dict[str, Any]] = Field(default_factory=list, description="Result rows.")
