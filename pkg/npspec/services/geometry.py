# npspec/services/geometry.py
"""
The perturbed sphere as a radial graph rho(w) w with rho = 1 + h a(w).

Surface gradients of rho come from Cartesian gradients of solid harmonics
projected onto the tangent plane, so nothing here uses theta/phi partials.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from npspec.models.shape import ShapeSpec, ShapeTerm
from npspec.services.base import GeometryError
from npspec.services.harmonics import (
    SpherePoint,
    as_points,
    basis_indices,
    basis_size,
    position,
    real_harmonics,
    real_to_complex_matrix,
    solid_harmonic_gradients,
    solid_harmonics,
    surface_gradients,
)
from npspec.services.quadrature import QuadratureGrid, build_grid, grid_for_exactness
from npspec.settings import get_settings

logger = logging.getLogger(__name__)

STAR_CHECK_GRID = (64, 128)


@dataclass(frozen=True)
class SurfaceFrame:
    """Position, unit outward normal and area ratio dS/dsigma at surface points."""

    point: NDArray[np.float64]
    normal: NDArray[np.float64]
    area_weight: NDArray[np.float64] | float


def real_coefficients(shape: ShapeSpec) -> NDArray[np.float64]:
    """Real-basis coefficient vector alpha of a, in basis order up to shape.degree."""
    alpha = np.zeros(basis_size(shape.degree))
    for term in shape.coeffs:
        alpha[position(term.k, term.l)] = term.coeff
    return alpha


def complex_coefficients(shape: ShapeSpec) -> NDArray[np.complex128]:
    """Coefficients c with a = sum c_{k,l} Y_{k,l}."""
    return real_to_complex_matrix(shape.degree) @ real_coefficients(shape)


def field_values(shape: ShapeSpec, points: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """a and its tangential gradient at unit points: arrays (n,) and (n, 3)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    c = complex_coefficients(shape)
    values = solid_harmonics(pts, shape.degree)
    grads = solid_harmonic_gradients(pts, shape.degree)
    surf = surface_gradients(pts, shape.degree, values=values, gradients=grads)
    return (values @ c).real, np.einsum("nbd,b->nd", surf, c).real


def eval_a(shape: ShapeSpec, omega: ArrayLike | SpherePoint) -> float | NDArray[np.float64]:
    """The perturbation field a(omega) = sum alpha_{k,l} Y^real_{k,l}(omega)."""
    pts, single = as_points(omega)
    values = real_harmonics(pts, shape.degree) @ real_coefficients(shape)
    return float(values[0]) if single else values


@lru_cache(maxsize=256)
def star_margin(shape: ShapeSpec) -> float:
    """max |h a| over the star-shape check grid."""
    grid = build_grid(*STAR_CHECK_GRID)
    return float(np.max(np.abs(shape.h * eval_a(shape, grid.nodes))))


def ensure_star_shaped(shape: ShapeSpec) -> None:
    """
    Raises:
        GeometryError: If max |h a| exceeds the configured margin.
    """
    margin = get_settings().star_margin
    observed = star_margin(shape)
    if observed > margin:
        logger.error(f"Star-shape check failed: max|h a| = {observed:.4g} > {margin}")
        raise GeometryError(
            f"surface is not safely star-shaped: max|h a| = {observed:.4g} exceeds {margin}"
        )


def frame_from_fields(
    points: NDArray[np.float64],
    rho: NDArray[np.float64],
    grad_rho: NDArray[np.float64],
) -> SurfaceFrame:
    """Frame of the radial graph rho(w) w from rho and its tangential gradient."""
    stretch = np.sqrt(rho**2 + np.sum(grad_rho**2, axis=-1))
    return SurfaceFrame(
        point=rho[:, None] * points,
        normal=(rho[:, None] * points - grad_rho) / stretch[:, None],
        area_weight=rho * stretch,
    )


def frame(shape: ShapeSpec, omega: ArrayLike | SpherePoint) -> SurfaceFrame:
    """
    Surface frame at omega: point rho w, normal (rho w - G)/sqrt(rho^2 + |G|^2),
    area weight rho sqrt(rho^2 + |G|^2), with G the tangential gradient of rho.

    Raises:
        GeometryError: If the shape is not star-shaped.
    """
    ensure_star_shaped(shape)
    pts, single = as_points(omega)
    a, grad_a = field_values(shape, pts)
    result = frame_from_fields(pts, 1.0 + shape.h * a, shape.h * grad_a)
    if single:
        return SurfaceFrame(
            point=result.point[0],
            normal=result.normal[0],
            area_weight=float(result.area_weight[0]),
        )
    return result


def tangential_part(v: ArrayLike, normal: ArrayLike) -> NDArray[np.float64]:
    """v - (v . n) n for a unit normal n (broadcasts over leading axes)."""
    v = np.asarray(v, dtype=float)
    n = np.asarray(normal, dtype=float)
    return v - np.sum(v * n, axis=-1, keepdims=True) * n


def surface_area(shape: ShapeSpec, grid: QuadratureGrid | None = None) -> float:
    """Area of the perturbed surface, integral of the area weight over S^2."""
    if grid is None:
        grid = build_grid(48, 96)
    weights = frame(shape, grid.nodes).area_weight
    return float(np.sum(grid.weights * weights))


def rotate_shape(shape: ShapeSpec, rotation: ArrayLike) -> ShapeSpec:
    """
    Shape whose surface is the image of `shape` under the rotation matrix R.

    The new field is a(R^T w); its real-basis coefficients are recovered by
    projection with a grid that is exact for products of degree-d harmonics.
    """
    r = np.asarray(rotation, dtype=float)
    degree = shape.degree
    grid = grid_for_exactness(2 * degree)
    rotated_values = eval_a(shape, grid.nodes @ r)  # row-vector form of R^T w
    basis = real_harmonics(grid.nodes, degree)
    alpha = basis.T @ (grid.weights * rotated_values)
    terms = tuple(
        ShapeTerm(k=k, l=l, coeff=float(alpha[j]))  # noqa: E741
        for j, (k, l) in enumerate(basis_indices(degree))
        if abs(alpha[j]) > 1e-15
    )
    return ShapeSpec(h=shape.h, coeffs=terms)
