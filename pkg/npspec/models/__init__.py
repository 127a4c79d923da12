"""Data models for np-spectra."""

from npspec.models.config import GridSize, RunConfig
from npspec.models.results import PlasmonValue, Report, ZetaResult
from npspec.models.shape import HarmonicIndex, ShapeSpec, ShapeTerm

__all__ = [
    "GridSize",
    "HarmonicIndex",
    "PlasmonValue",
    "Report",
    "RunConfig",
    "ShapeSpec",
    "ShapeTerm",
    "ZetaResult",
]
