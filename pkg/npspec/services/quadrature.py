# npspec/services/quadrature.py
"""
Product quadrature on the unit sphere.

build_grid pairs Gauss-Legendre nodes in cos(theta) with the trapezoid rule
in phi. rotated_grid is the polar rule used for weakly singular integrands:
Gauss-Legendre nodes in the geodesic angle theta' from a chosen pole, so the
area factor sin(theta') cancels a 1/|x - y| singularity at the pole and the
remaining integrand is analytic in theta'.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray
from scipy.spatial.transform import Rotation

from npspec.services.base import DomainError, QuadratureError
from npspec.services.harmonics import SpherePoint, as_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureGrid:
    """Immutable nodes and positive weights on S^2, stored row-major in (theta, phi)."""

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    exactness: int
    n_theta: int
    n_phi: int

    def __post_init__(self) -> None:
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.weights.shape[0]


def _azimuths(n_phi: int) -> NDArray[np.float64]:
    return 2.0 * np.pi * np.arange(n_phi) / n_phi


def build_grid(n_theta: int, n_phi: int) -> QuadratureGrid:
    """
    Gauss-Legendre in cos(theta) times the uniform trapezoid rule in phi.

    Integrates every Y_{k,l} with k <= min(2 n_theta - 1, n_phi - 1) exactly.
    """
    if n_theta < 1 or n_phi < 1:
        raise DomainError(f"grid resolutions must be positive, got {n_theta}x{n_phi}")
    cos_t, w_t = leggauss(n_theta)
    sin_t = np.sqrt(1.0 - cos_t**2)
    phi = _azimuths(n_phi)

    nodes = np.stack(
        [
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
            np.repeat(cos_t, n_phi),
        ],
        axis=1,
    )
    weights = np.outer(w_t, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    return QuadratureGrid(
        nodes=nodes,
        weights=weights,
        exactness=min(2 * n_theta - 1, n_phi - 1),
        n_theta=n_theta,
        n_phi=n_phi,
    )


def grid_for_exactness(degree: int) -> QuadratureGrid:
    """Smallest product grid integrating all harmonics up to `degree` exactly."""
    degree = max(degree, 0)
    return build_grid(degree // 2 + 1, degree + 1)


def pole_rotation(pole: NDArray[np.float64]) -> NDArray[np.float64]:
    """Rotation matrix R_z(phi) R_y(theta) carrying the north pole to `pole`."""
    p = SpherePoint.from_cartesian(*pole)
    return Rotation.from_euler("ZY", [p.phi, p.theta]).as_matrix()


def rotated_grid(pole: NDArray[np.float64] | SpherePoint, n_theta: int, n_phi: int) -> QuadratureGrid:
    """
    Polar product rule centred on `pole`.

    Nodes sit at Gauss-Legendre geodesic angles theta' in (0, pi) and uniform
    azimuths phi'; weights carry the sin(theta') area factor. The pole itself
    is never a node.
    """
    if n_theta < 1 or n_phi < 1:
        raise DomainError(f"grid resolutions must be positive, got {n_theta}x{n_phi}")
    pts, _ = as_points(pole)
    rotation = pole_rotation(pts[0])

    t, w_t = leggauss(n_theta)
    theta = 0.5 * np.pi * (t + 1.0)
    w_theta = 0.5 * np.pi * w_t * np.sin(theta)
    phi = _azimuths(n_phi)

    local = np.stack(
        [
            np.outer(np.sin(theta), np.cos(phi)).ravel(),
            np.outer(np.sin(theta), np.sin(phi)).ravel(),
            np.repeat(np.cos(theta), n_phi),
        ],
        axis=1,
    )
    weights = np.outer(w_theta, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    return QuadratureGrid(
        nodes=local @ rotation.T,
        weights=weights,
        # Gauss-Legendre in theta' is spectrally accurate, not polynomially exact;
        # half the node count is a conservative nominal degree.
        exactness=min(n_theta // 2, n_phi - 1),
        n_theta=n_theta,
        n_phi=n_phi,
    )


def integrate(f: Callable[[NDArray[np.float64]], NDArray], grid: QuadratureGrid) -> complex:
    """
    Sum of w_i f(omega_i); f receives the (n, 3) node array and returns n values.

    Raises:
        QuadratureError: If f is not finite at some node.
    """
    values = np.asarray(f(grid.nodes))
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        node = grid.nodes[i]
        logger.error(f"Non-finite integrand at node {i}")
        raise QuadratureError(
            f"integrand is not finite at node {i} ({node[0]:.6g}, {node[1]:.6g}, {node[2]:.6g})"
        )
    return complex(np.sum(grid.weights * values))
