# npspec/services/np_operator.py
"""
The Neumann-Poincare operator K* on the sphere and on radially perturbed spheres.

K*[phi](x) = int_{dOmega} <x - y, n_x> / (4 pi |x - y|^3) phi(y) dS(y)

Densities on dOmega(h) are identified with functions on S^2 by radial
projection and expanded in Y_{k,l}, k <= L. The Galerkin matrix uses the
surface-measure inner product <f, g> = int f conj(g) (dS/dsigma) dsigma, so
A = G^{-1} B with G the Gram matrix and B the projected operator. At h = 0
both are diagonal and A = diag(1/(2(2k+1))).

The inner integral for an outer node x uses a rotated polar grid centred on
x. Outer nodes on one latitude differ by rotations about the z axis, which
act on Y_{k,l} as the phase e^{i l phi}; one rotated grid per latitude is
therefore enough, and the shape field is rotated through its coefficients.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg
import scipy.optimize
from joblib import Parallel, delayed
from numpy.typing import ArrayLike, NDArray

from npspec.models.config import GridSize
from npspec.models.shape import ShapeSpec
from npspec.services.base import (
    AssemblyError,
    ClusterOverlapError,
    DomainError,
    EigensolveError,
    SingularityError,
    SymmetrizationWarning,
    resolve_threads,
)
from npspec.services.geometry import complex_coefficients, ensure_star_shaped, frame
from npspec.services.harmonics import (
    basis_indices,
    basis_orders,
    solid_harmonics,
    surface_gradients,
)
from npspec.services.quadrature import QuadratureGrid, build_grid, rotated_grid
from npspec.settings import get_settings

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * np.pi


# --- Sphere spectrum ---


def sphere_np_eigenvalue(k: int) -> float:
    """1/(2(2k+1)), the NP eigenvalue of multiplicity 2k+1 on the unit sphere."""
    if k < 0:
        raise DomainError(f"degree must be non-negative, got {k}")
    return float(Fraction(1, 2 * (2 * k + 1)))


def sphere_single_layer_eigenvalue(k: int) -> float:
    """-1/(2k+1): the single layer potential acting on Y_{k,l} on the unit sphere."""
    if k < 0:
        raise DomainError(f"degree must be non-negative, got {k}")
    return float(Fraction(-1, 2 * k + 1))


def sphere_multiplet_sum(k: int) -> float:
    """Sum of the 2k+1 sphere eigenvalues of degree k; always exactly 1/2."""
    return float((2 * k + 1) * Fraction(1, 2 * (2 * k + 1)))


def np_kernel(x: ArrayLike, y: ArrayLike, n_x: ArrayLike) -> float | NDArray[np.float64]:
    """
    <x - y, n_x> / (4 pi |x - y|^3), broadcasting over leading axes.

    Raises:
        SingularityError: If x = y for any pair.
    """
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    dist = np.linalg.norm(diff, axis=-1)
    if np.any(dist == 0.0):
        raise SingularityError("NP kernel evaluated at coincident points")
    value = np.sum(diff * np.asarray(n_x, dtype=float), axis=-1) / (FOUR_PI * dist**3)
    return float(value) if np.ndim(value) == 0 else value


# --- Galerkin system ---


@dataclass(frozen=True)
class AssemblyConfig:
    """Degree cap and quadrature resolutions of a Galerkin assembly."""

    degree: int
    outer: GridSize
    inner: GridSize
    threads: int = 1

    @classmethod
    def from_settings(
        cls,
        degree: int | None = None,
        outer: GridSize | None = None,
        inner: GridSize | None = None,
        threads: int | None = None,
    ) -> "AssemblyConfig":
        settings = get_settings()
        return cls(
            degree=degree if degree is not None else settings.degree_cap,
            outer=outer or GridSize(n_theta=settings.outer_theta, n_phi=settings.outer_phi),
            inner=inner or GridSize(n_theta=settings.inner_theta, n_phi=settings.inner_phi),
            threads=resolve_threads(threads),
        )


@dataclass(frozen=True)
class NPSystem:
    """Dense Galerkin matrix of K* on dOmega(h) in the basis Y_{k,l}, k <= degree."""

    degree: int
    matrix: NDArray[np.complex128]
    gram: NDArray[np.complex128]
    shape: ShapeSpec
    config: AssemblyConfig

    @property
    def indices(self) -> tuple[tuple[int, int], ...]:
        return basis_indices(self.degree)

    @property
    def gram_condition(self) -> float:
        """2-norm condition number of the surface Gram matrix."""
        return float(np.linalg.cond(self.gram))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of an NPSystem sorted by descending real part."""

    values: NDArray[np.complex128]
    vectors: NDArray[np.complex128]
    max_imag: float

    @property
    def real_values(self) -> NDArray[np.float64]:
        return self.values.real


@dataclass(frozen=True)
class Multiplet:
    """The 2k+1 eigenvalue branches bifurcating from the degree-k sphere eigenvalue."""

    k: int
    values: NDArray[np.float64]
    vectors: NDArray[np.complex128]
    overlaps: NDArray[np.float64]
    residual_imag: float

    @property
    def total(self) -> float:
        return math.fsum(self.values)


@dataclass(frozen=True)
class FDSlopes:
    """Central-difference slopes of a multiplet, raw and Richardson-extrapolated."""

    k: int
    h_levels: tuple[float, ...]
    raw_branch: NDArray[np.float64]
    raw_sum: float
    branch: NDArray[np.float64]
    sum: float


def _inner_row(
    i: int,
    outer: QuadratureGrid,
    point: NDArray[np.float64],
    normal: NDArray[np.float64],
    shape: ShapeSpec,
    shape_phase: NDArray[np.complex128],
    basis_phase: NDArray[np.complex128],
    config: AssemblyConfig,
) -> NDArray[np.complex128]:
    """
    v[j, b] = int K(x_ij, y) Y_b(y) dS(y) for every outer node x_ij on latitude row i.
    """
    n_phi = outer.n_phi
    rows = slice(i * n_phi, (i + 1) * n_phi)
    pole = outer.nodes[i * n_phi]  # phi = 0 node of the row
    inner = rotated_grid(pole, config.inner.n_theta, config.inner.n_phi)
    omega = inner.nodes
    y_inner = solid_harmonics(omega, config.degree)

    # The field seen from node j is the shape rotated by -phi_j about z.
    if shape.h != 0.0 and shape.coeffs:
        values = solid_harmonics(omega, shape.degree)
        surf = surface_gradients(omega, shape.degree, values=values)
        a = (values @ shape_phase.T).real.T
        grad_a = np.einsum("mad,ja->jmd", surf, shape_phase).real
        rho = 1.0 + shape.h * a
        grad_rho = shape.h * grad_a
        area = rho * np.sqrt(rho**2 + np.sum(grad_rho**2, axis=-1))
    else:
        rho = np.ones((n_phi, omega.shape[0]))
        area = rho

    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    cos_p, sin_p = np.cos(phi)[:, None], np.sin(phi)[:, None]

    def unrotate(v: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.stack(
            [cos_p[:, 0] * v[:, 0] + sin_p[:, 0] * v[:, 1],
             -sin_p[:, 0] * v[:, 0] + cos_p[:, 0] * v[:, 1],
             v[:, 2]],
            axis=1,
        )

    x = unrotate(point[rows])
    n_x = unrotate(normal[rows])
    y = rho[:, :, None] * omega[None, :, :]
    kernel = np_kernel(x[:, None, :], y, n_x[:, None, :])
    weighted = kernel * area * inner.weights[None, :]
    logger.debug(f"Assembled inner integrals for latitude row {i}")
    return (weighted @ y_inner) * basis_phase


def assemble(shape: ShapeSpec, config: AssemblyConfig | None = None) -> NPSystem:
    """
    Galerkin matrix of K* on dOmega(h).

    A[(k,l),(k',l')] = (G^{-1} B) with
    B_ab = int conj(Y_a(x)) W(x) int K(x, y) Y_b(y) W(y) dsigma(y) dsigma(x),
    G_ab = int conj(Y_a) Y_b W dsigma, W the area weight of the surface.

    Raises:
        GeometryError: If the shape is not star-shaped.
        AssemblyError: If any entry is not finite.
    """
    config = config or AssemblyConfig.from_settings()
    if config.degree < 1:
        raise DomainError(f"degree cap must be at least 1, got {config.degree}")
    ensure_star_shaped(shape)
    logger.info(
        f"Assembling K* (L={config.degree}, outer {config.outer}, inner {config.inner}, "
        f"h={shape.h}, threads={config.threads})"
    )

    outer = build_grid(config.outer.n_theta, config.outer.n_phi)
    surface = frame(shape, outer.nodes)
    y_outer = solid_harmonics(outer.nodes, config.degree)

    phi = 2.0 * np.pi * np.arange(outer.n_phi) / outer.n_phi
    basis_phase = np.exp(1j * np.outer(phi, basis_orders(config.degree)))
    shape_phase = complex_coefficients(shape)[None, :] * np.exp(
        1j * np.outer(phi, basis_orders(shape.degree))
    )

    rows = Parallel(n_jobs=config.threads, prefer="threads")(
        delayed(_inner_row)(
            i, outer, surface.point, surface.normal, shape, shape_phase, basis_phase, config
        )
        for i in range(outer.n_theta)
    )
    inner_integrals = np.vstack(rows)

    test = np.conj(y_outer) * (outer.weights * surface.area_weight)[:, None]
    projected = test.T @ inner_integrals
    gram = test.T @ y_outer
    try:
        matrix = scipy.linalg.solve(gram, projected, assume_a="her")
    except (scipy.linalg.LinAlgError, ValueError) as e:
        logger.error(f"Gram solve failed: {e}")
        raise AssemblyError(f"Gram matrix is singular: {e}") from e

    if not np.all(np.isfinite(matrix)):
        raise AssemblyError("Galerkin matrix contains non-finite entries")
    logger.info(f"Assembled {matrix.shape[0]}x{matrix.shape[1]} Galerkin matrix")
    return NPSystem(
        degree=config.degree,
        matrix=matrix,
        gram=gram,
        shape=shape,
        config=config,
    )


def eigensolve(system: NPSystem) -> EigenDecomposition:
    """
    All eigenpairs of the Galerkin matrix, sorted by descending real part.

    Large imaginary parts mean the discretization lost the symmetrizability of
    K*; they are reported through SymmetrizationWarning, not raised.

    Raises:
        EigensolveError: If the dense eigensolver fails.
    """
    try:
        values, vectors = scipy.linalg.eig(system.matrix)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        logger.error(f"Eigensolver failed: {e}")
        raise EigensolveError(f"dense eigensolver failed: {e}") from e

    order = np.argsort(-values.real, kind="stable")
    max_imag = float(np.max(np.abs(values.imag)))
    tolerance = get_settings().imag_tol
    if max_imag > tolerance:
        logger.warning(f"Max imaginary eigenvalue part {max_imag:.3g} exceeds {tolerance:.3g}")
        warnings.warn(
            f"max |imag| = {max_imag:.3g} exceeds {tolerance:.3g}",
            SymmetrizationWarning,
            stacklevel=2,
        )
    return EigenDecomposition(values=values[order], vectors=vectors[:, order], max_imag=max_imag)


def track_multiplet(
    system: NPSystem,
    k: int,
    decomposition: EigenDecomposition | None = None,
) -> Multiplet:
    """
    Select the 2k+1 eigenpairs with the largest weight on the degree-k harmonics.

    Eigenpairs are ranked greedily by that overlap; ties go to the eigenvalue
    closest to 1/(2(2k+1)).

    Raises:
        ClusterOverlapError: If the selected branches are not dominated by
            degree k or leave the band around the sphere eigenvalue.
    """
    if not 0 <= k <= system.degree:
        raise DomainError(f"degree {k} is outside the basis 0..{system.degree}")
    decomposition = decomposition or eigensolve(system)
    vectors = decomposition.vectors
    block = slice(k * k, (k + 1) ** 2)
    overlaps = np.sum(np.abs(vectors[block]) ** 2, axis=0) / np.sum(np.abs(vectors) ** 2, axis=0)

    target = sphere_np_eigenvalue(k)
    ranked = sorted(
        range(vectors.shape[1]),
        key=lambda j: (-round(float(overlaps[j]), 10), abs(decomposition.values[j].real - target)),
    )
    chosen = np.array(ranked[: 2 * k + 1])
    chosen = chosen[np.argsort(-decomposition.values[chosen].real, kind="stable")]

    values = decomposition.values[chosen].real
    band = 0.25 / (2 * k + 1)
    if np.min(overlaps[chosen]) <= 0.5 or np.max(np.abs(values - target)) > band:
        logger.error(f"Multiplet k={k} cannot be separated at h={system.shape.h}")
        raise ClusterOverlapError(
            f"degree-{k} multiplet overlaps its neighbours at h={system.shape.h}; reduce h"
        )
    return Multiplet(
        k=k,
        values=values,
        vectors=vectors[:, chosen],
        overlaps=overlaps[chosen],
        residual_imag=float(np.max(np.abs(decomposition.values[chosen].imag))),
    )


def pair_branches(plus: Multiplet, minus: Multiplet) -> NDArray[np.float64]:
    """
    Values of `minus` reordered so that entry i continues branch i of `plus`.

    Branches are matched by a maximal-overlap assignment of their degree-k
    eigenvector components. Exactly degenerate values are interchangeable.
    """
    block = slice(plus.k * plus.k, (plus.k + 1) ** 2)
    p = plus.vectors[block] / np.linalg.norm(plus.vectors[block], axis=0)
    m = minus.vectors[block] / np.linalg.norm(minus.vectors[block], axis=0)
    overlap = np.abs(p.conj().T @ m) ** 2
    rows, cols = scipy.optimize.linear_sum_assignment(overlap, maximize=True)
    logger.debug(f"k={plus.k}: branch overlaps {np.round(overlap[rows, cols], 6).tolist()}")
    return minus.values[cols[np.argsort(rows)]]


def fd_multiplet_slopes(
    shape: ShapeSpec,
    k: int,
    h_values: list[float] | tuple[float, ...],
    config: AssemblyConfig | None = None,
) -> FDSlopes:
    """
    Central-difference slopes d lambda_{k,l}/dh at h = 0 from Galerkin multiplets.

    Branches at +h and -h are paired by eigenvector overlap (`pair_branches`);
    slopes at each level are then sorted in descending order. With two
    amplitude levels one Richardson step removes the h^2 error term. The
    amplitude stored in `shape` is ignored.

    Raises:
        DomainError: If h_values is not symmetric around 0.
        ClusterOverlapError: Propagated from multiplet tracking.
    """
    given = set(float(h) for h in h_values)
    if not given or any(-h not in given for h in given):
        raise DomainError(f"h values must be symmetric around 0, got {sorted(given)}")
    levels = sorted({abs(h) for h in given if h != 0.0}, reverse=True)
    if not levels:
        raise DomainError("h values must contain a non-zero amplitude")
    config = config or AssemblyConfig.from_settings()

    branch: dict[float, NDArray[np.float64]] = {}
    sums: dict[float, float] = {}
    for h in levels:
        plus = track_multiplet(assemble(shape.with_amplitude(h), config), k)
        minus = track_multiplet(assemble(shape.with_amplitude(-h), config), k)
        slopes = (plus.values - pair_branches(plus, minus)) / (2.0 * h)
        branch[h] = np.sort(slopes)[::-1]
        sums[h] = (plus.total - minus.total) / (2.0 * h)
        logger.info(f"k={k} h={h}: central slopes {np.round(branch[h], 8).tolist()}")

    small = levels[-1]
    if len(levels) >= 2:
        big = levels[-2]
        r2 = (big / small) ** 2
        extrapolated = (r2 * branch[small] - branch[big]) / (r2 - 1.0)
        extrapolated_sum = (r2 * sums[small] - sums[big]) / (r2 - 1.0)
    else:
        extrapolated, extrapolated_sum = branch[small], sums[small]

    return FDSlopes(
        k=k,
        h_levels=tuple(levels),
        raw_branch=branch[small],
        raw_sum=sums[small],
        branch=extrapolated,
        sum=extrapolated_sum,
    )
