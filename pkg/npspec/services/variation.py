# npspec/services/variation.py
"""
First variation of NP eigenvalues on the sphere.

For the surface rho = 1 + h a and a sphere eigenvalue lambda_k of degree k,
the first-order branch slopes d lambda_{k,l}/dh at h = 0 are the eigenvalues
of the Hermitian multiplet matrix

    M_{l,l'} = (1/k) int_{S^2} a [ (lambda_k - 1/2) grad u_l . conj(grad u_l')
                                   + k^2 Y_{k,l} conj(Y_{k,l'}) ] dsigma,

with u_l = r^k Y_{k,l} normalized so that its Dirichlet energy in the ball
is one. The trace of M vanishes for every a: the multiplet is in equilibrium.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from npspec.models.results import PlasmonValue
from npspec.models.shape import ShapeSpec
from npspec.services.base import DomainError, QuadratureError
from npspec.services.geometry import eval_a
from npspec.services.harmonics import solid_harmonic_gradients, solid_harmonics
from npspec.services.np_operator import sphere_np_eigenvalue
from npspec.services.quadrature import QuadratureGrid, grid_for_exactness
from npspec.settings import get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariationMatrix:
    """Multiplet variation matrix of degree k, rows and columns ordered l = -k..k."""

    k: int
    matrix: NDArray[np.complex128]
    exactness: int
    n_nodes: int

    @property
    def slopes(self) -> NDArray[np.float64]:
        """First-order branch slopes, descending."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def norm(self) -> float:
        """Spectral norm, the largest |slope|."""
        return float(np.max(np.abs(self.slopes)))

    @property
    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def in_equilibrium(self, tol: float | None = None) -> bool:
        """|trace| <= tol * max(norm, 1)."""
        tol = tol if tol is not None else get_settings().trace_tol
        return abs(self.trace) <= tol * max(self.norm, 1.0)


def variation_matrix(k: int, a: ShapeSpec, grid: QuadratureGrid | None = None) -> VariationMatrix:
    """
    Variation matrix M for the degree-k multiplet under the perturbation field a.

    Only the field a is used; its amplitude h is irrelevant at first order.

    Args:
        k: Multiplet degree, k >= 1.
        a: Perturbation field.
        grid: Quadrature grid; defaults to the cheapest grid exact to
            degree 2k + deg(a) + 2.

    Raises:
        DomainError: If k < 1.
        QuadratureError: If the supplied grid is not exact enough.
    """
    if k < 1:
        raise DomainError(f"variation is defined for k >= 1 (lambda = 1/2 at k = 0), got {k}")
    required = 2 * k + a.degree + 2
    if grid is None:
        grid = grid_for_exactness(required)
    elif grid.exactness < required:
        raise QuadratureError(
            f"grid exactness {grid.exactness} is below the required {required} for k={k}"
        )

    block = slice(k * k, (k + 1) ** 2)
    values = solid_harmonics(grid.nodes, k)[:, block]
    grads = solid_harmonic_gradients(grid.nodes, k)[:, block]
    weighted = grid.weights * eval_a(a, grid.nodes)

    energy = np.einsum("n,nid,njd->ij", weighted, grads, grads.conj())
    mass = np.einsum("n,ni,nj->ij", weighted, values, values.conj())
    matrix = ((sphere_np_eigenvalue(k) - 0.5) * energy + k * k * mass) / k

    logger.debug(f"Variation matrix k={k}: trace {np.trace(matrix).real:.3e}")
    return VariationMatrix(k=k, matrix=matrix, exactness=grid.exactness, n_nodes=grid.size)


def equilibrium_check(k: int, a: ShapeSpec, grid: QuadratureGrid | None = None) -> float:
    """Sum of the first-order slopes of the degree-k multiplet, trace(M)."""
    if not a.coeffs:
        return 0.0
    result = variation_matrix(k, a, grid)
    logger.info(f"Equilibrium k={k}: trace {result.trace:.3e}, norm {result.norm:.3e}")
    return result.trace


# --- Plasmonic correspondence ---


def plasmon_from_np(lam: float) -> PlasmonValue:
    """
    epsilon = (-lambda - 1/2) / (lambda - 1/2).

    Raises:
        DomainError: If lambda = 1/2.
    """
    if lam == 0.5:
        raise DomainError("lambda = 1/2 has no plasmonic counterpart")
    return PlasmonValue(epsilon=(-lam - 0.5) / (lam - 0.5))


def np_from_plasmon(epsilon: float | PlasmonValue) -> float:
    """
    lambda = (epsilon - 1) / (2 (epsilon + 1)).

    Raises:
        DomainError: If epsilon = -1.
    """
    eps = epsilon.epsilon if isinstance(epsilon, PlasmonValue) else float(epsilon)
    if eps == -1.0:
        raise DomainError("epsilon = -1 has no NP counterpart")
    return (eps - 1.0) / (2.0 * (eps + 1.0))


def plasmon_slope(lam: float, dlam: float | ArrayLike) -> float | NDArray[np.float64]:
    """
    d epsilon / dh = (d lambda / dh) / (lambda - 1/2)^2.

    Raises:
        DomainError: If lambda = 1/2.
    """
    if lam == 0.5:
        raise DomainError("plasmon slope has a pole at lambda = 1/2")
    slope = np.asarray(dlam, dtype=float) / (lam - 0.5) ** 2
    return float(slope) if slope.ndim == 0 else slope


def plasmon_multiplet_slopes(variation: VariationMatrix) -> NDArray[np.float64]:
    """Plasmonic branch slopes of a multiplet; they sum to zero with the NP slopes."""
    return plasmon_slope(sphere_np_eigenvalue(variation.k), variation.slopes)
