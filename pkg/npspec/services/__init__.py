"""Computation services: harmonics, quadrature, geometry, the NP operator and its spectra."""

from npspec.services.base import (
    AssemblyError,
    ClusterOverlapError,
    DegreeOverflowError,
    DivergenceError,
    DomainError,
    EigensolveError,
    GeometryError,
    NPSpecError,
    QuadratureError,
    SingularityError,
    SymmetrizationWarning,
)

__all__ = [
    "AssemblyError",
    "ClusterOverlapError",
    "DegreeOverflowError",
    "DivergenceError",
    "DomainError",
    "EigensolveError",
    "GeometryError",
    "NPSpecError",
    "QuadratureError",
    "SingularityError",
    "SymmetrizationWarning",
]
