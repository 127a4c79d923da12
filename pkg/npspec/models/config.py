# npspec/models/config.py
from pathlib import Path
from typing import Literal

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator, model_validator

Command = Literal["spectrum", "variation", "fd-check", "zeta", "halfsum"]


class GridSize(BaseModel):
    """Resolution of a product quadrature grid."""

    model_config = ConfigDict(frozen=True)

    n_theta: int = Field(..., ge=1, description="Gauss-Legendre nodes in the polar direction.")
    n_phi: int = Field(..., ge=1, description="Trapezoid nodes in the azimuthal direction.")

    @classmethod
    def parse(cls, text: str) -> "GridSize":
        """Parse the NTHETAxNPHI command-line form, e.g. '32x64'."""
        parts = text.lower().split("x")
        if len(parts) != 2:
            raise ValueError(f"grid must look like NTHETAxNPHI, got {text!r}")
        return cls(n_theta=int(parts[0]), n_phi=int(parts[1]))

    def __str__(self) -> str:
        return f"{self.n_theta}x{self.n_phi}"


class RunConfig(BaseModel):
    """Fully resolved configuration of one CLI command."""

    model_config = ConfigDict(frozen=True)

    command: Command
    analytic: bool = False
    shape_path: Path | None = None
    kmax: int | None = Field(None, ge=0)
    k: int | None = None
    degree: int = Field(..., ge=1, le=20)
    grid: GridSize
    inner_grid: GridSize
    h_values: tuple[float, ...] = ()
    p: float | None = None
    out: Path | None = None
    format: Literal["csv", "json"] = "csv"
    threads: int = Field(..., ge=1)
    tol: PositiveFloat | None = None

    @field_validator("shape_path")
    @classmethod
    def shape_file_exists(cls, v: Path | None) -> Path | None:
        if v is not None and not v.is_file():
            raise ValueError(f"shape file not found: {v}")
        return v

    @model_validator(mode="after")
    def check_required_inputs(self) -> Self:
        needs_shape = self.command in {"variation", "fd-check", "halfsum"} or (
            self.command == "spectrum" and not self.analytic
        )
        if needs_shape and self.shape_path is None:
            raise ValueError(f"'{self.command}' requires --shape")
        if self.command in {"variation", "fd-check"} and self.k is None:
            raise ValueError(f"'{self.command}' requires --k")
        if self.command in {"fd-check", "halfsum"} and not self.h_values:
            raise ValueError(f"'{self.command}' requires --h")
        if self.command == "zeta" and self.p is None:
            raise ValueError("'zeta' requires --p")
        return self
