# npspec/models/shape.py
from pathlib import Path
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

MAX_DEGREE = 60


class HarmonicIndex(BaseModel):
    """
    A pair (k, l) indexing the complex spherical harmonic Y_{k,l}.
    """

    model_config = ConfigDict(frozen=True)

    k: int = Field(
        ...,
        ge=0,
        description="Degree of the harmonic."
    )
    l: int = Field(  # noqa: E741
        ...,
        description="Order of the harmonic, |l| <= k."
    )

    @model_validator(mode="after")
    def check_order(self) -> Self:
        if abs(self.l) > self.k:
            raise ValueError(f"order l={self.l} exceeds degree k={self.k}")
        return self

    @property
    def position(self) -> int:
        """Column of this index in the degree-ordered basis (k, -k..k)."""
        return self.k * self.k + self.k + self.l


class ShapeTerm(BaseModel):
    """One real spherical-harmonic term alpha_{k,l} Y^real_{k,l} of the perturbation field."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(
        ...,
        ge=0,
        le=MAX_DEGREE,
        description="Degree of the real harmonic."
    )
    l: int = Field(  # noqa: E741
        ...,
        description="Order of the real harmonic, |l| <= k."
    )
    coeff: float = Field(
        ...,
        allow_inf_nan=False,
        description="Real coefficient alpha_{k,l}."
    )

    @model_validator(mode="after")
    def check_order(self) -> Self:
        if abs(self.l) > self.k:
            raise ValueError(f"order l={self.l} exceeds degree k={self.k}")
        return self


class ShapeSpec(BaseModel):
    """
    Radially perturbed unit sphere {(1 + h a(w)) w : w in S^2}.

    The perturbation field a is a finite real spherical-harmonic expansion.
    JSON form: {"h": number, "a": [{"k": int, "l": int, "coeff": number}, ...]}.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    h: float = Field(
        ...,
        allow_inf_nan=False,
        description="Perturbation amplitude."
    )
    coeffs: tuple[ShapeTerm, ...] = Field(
        default=(),
        alias="a",
        description="Real harmonic terms of the perturbation field a."
    )

    @field_validator("coeffs")
    @classmethod
    def reject_duplicate_terms(cls, v: tuple[ShapeTerm, ...]) -> tuple[ShapeTerm, ...]:
        seen = set()
        for term in v:
            if (term.k, term.l) in seen:
                raise ValueError(f"duplicate term for (k={term.k}, l={term.l})")
            seen.add((term.k, term.l))
        return v

    @property
    def degree(self) -> int:
        """Highest harmonic degree present in a (0 for the empty field)."""
        return max((term.k for term in self.coeffs), default=0)

    def with_amplitude(self, h: float) -> "ShapeSpec":
        """Same perturbation field at another amplitude."""
        return self.model_copy(update={"h": float(h)})

    @classmethod
    def from_terms(cls, h: float, terms: dict[tuple[int, int], float]) -> "ShapeSpec":
        """Build a shape from a {(k, l): coeff} mapping."""
        return cls(
            h=h,
            coeffs=tuple(ShapeTerm(k=k, l=l, coeff=c) for (k, l), c in sorted(terms.items())),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ShapeSpec":
        """Load a shape file; raises pydantic.ValidationError on schema problems."""
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
