"""Shared exceptions and worker configuration for the computation services."""

import logging

from npspec.settings import get_settings

logger = logging.getLogger(__name__)


class NPSpecError(Exception):
    """Base exception for all computation errors."""

    pass


class DegreeOverflowError(NPSpecError):
    """Raised when a harmonic degree exceeds the supported cap."""

    pass


class QuadratureError(NPSpecError):
    """Raised when an integrand is not finite or a grid is not exact enough."""

    pass


class GeometryError(NPSpecError):
    """Raised when a perturbed surface is not a star-shaped radial graph."""

    pass


class SingularityError(NPSpecError):
    """Raised when the NP kernel is evaluated on its diagonal."""

    pass


class AssemblyError(NPSpecError):
    """Raised when the Galerkin matrix contains non-finite entries."""

    pass


class EigensolveError(NPSpecError):
    """Raised when the dense eigensolver fails."""

    pass


class ClusterOverlapError(NPSpecError):
    """Raised when an eigenvalue multiplet cannot be separated from its neighbours."""

    pass


class DomainError(NPSpecError, ValueError):
    """Raised for inputs outside an operation's domain (poles, invalid degrees)."""

    pass


class DivergenceError(DomainError):
    """Raised when a spectral sum is requested at an exponent where it diverges."""

    pass


class SymmetrizationWarning(UserWarning):
    """Eigenvalues of the discretized NP operator carry a large imaginary part."""

    pass


def resolve_threads(threads: int | None = None) -> int:
    """Worker count for parallel assembly: explicit value, else NPSPEC_THREADS."""
    if threads is None:
        return get_settings().threads
    if threads < 1:
        raise DomainError(f"threads must be positive, got {threads}")
    return threads
