"""Tests for product and rotated-pole quadrature on the sphere."""

import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from npspec.services.base import DomainError, QuadratureError
from npspec.services.harmonics import SpherePoint, eval_y, position, solid_harmonics
from npspec.services.np_operator import sphere_single_layer_eigenvalue
from npspec.services.quadrature import (
    build_grid,
    grid_for_exactness,
    integrate,
    pole_rotation,
    rotated_grid,
)
from tests.conftest import random_unit_points

SMOOTH_DIRECTION = np.array([0.3, -0.8, 0.5])
SMOOTH_NORM = math.hypot(0.3, -0.8, 0.5)
# int exp(w . v) dsigma = 4 pi sinh|v| / |v|
SMOOTH_INTEGRAL = 4 * math.pi * math.sinh(SMOOTH_NORM) / SMOOTH_NORM


def smooth(w: np.ndarray) -> np.ndarray:
    return np.exp(w @ SMOOTH_DIRECTION)


# --- Product Grid Tests ---


def test_build_grid_area_and_layout():
    """Test weights sum to the sphere area and nodes are unit vectors."""
    grid = build_grid(8, 16)
    assert grid.size == 128
    assert grid.weights.sum() == pytest.approx(4 * math.pi, rel=1e-14)
    np.testing.assert_allclose(np.linalg.norm(grid.nodes, axis=1), 1.0, atol=1e-15)
    assert grid.exactness == 15


def test_build_grid_is_immutable():
    """Test grid arrays are read-only."""
    grid = build_grid(4, 8)
    with pytest.raises(ValueError):
        grid.weights[0] = 0.0


def test_build_grid_rejects_empty_resolution():
    """Test non-positive resolutions raise a domain error."""
    with pytest.raises(DomainError):
        build_grid(0, 8)


@pytest.mark.parametrize("degree", [0, 3, 10, 17])
def test_grid_for_exactness_integrates_harmonics(degree):
    """Test every Y_{k,l} with k <= d integrates to sqrt(4 pi) delta_{k0}."""
    grid = grid_for_exactness(degree)
    assert grid.exactness >= degree
    integrals = grid.weights @ solid_harmonics(grid.nodes, degree)
    expected = np.zeros(integrals.shape, dtype=complex)
    expected[0] = math.sqrt(4 * math.pi)
    np.testing.assert_allclose(integrals, expected, atol=1e-12)


def test_integrate_returns_weighted_sum():
    """Test integrate on a polynomial with a known integral: int z^2 = 4 pi / 3."""
    grid = build_grid(6, 12)
    assert integrate(lambda w: w[:, 2] ** 2, grid) == pytest.approx(4 * math.pi / 3, rel=1e-14)


def test_integrate_reports_non_finite_node():
    """Test a non-finite integrand raises with the offending node."""
    grid = build_grid(4, 8)

    def blows_up(w):
        values = np.ones(len(w))
        values[5] = np.nan
        return values

    with pytest.raises(QuadratureError, match="node 5"):
        integrate(blows_up, grid)


# --- Rotated Grid Tests ---


def test_pole_rotation_carries_north_pole(rng):
    """Test the rotation maps e_z to the requested pole."""
    for pole in random_unit_points(rng, 10):
        np.testing.assert_allclose(pole_rotation(pole) @ [0, 0, 1], pole, atol=1e-14)


def test_rotated_grid_area_and_pole_avoidance(rng):
    """Test the rotated grid integrates 1 exactly and never places a node on the pole."""
    pole = random_unit_points(rng, 1)[0]
    grid = rotated_grid(pole, 24, 48)
    assert grid.weights.sum() == pytest.approx(4 * math.pi, rel=1e-13)
    assert np.min(np.linalg.norm(grid.nodes - pole, axis=1)) > 0.0
    np.testing.assert_allclose(np.linalg.norm(grid.nodes, axis=1), 1.0, atol=1e-14)


def test_rotated_grid_accepts_sphere_point():
    """Test SpherePoint poles work like arrays."""
    p = SpherePoint.from_angles(1.0, 0.5)
    np.testing.assert_allclose(rotated_grid(p, 4, 8).nodes, rotated_grid(p.xyz, 4, 8).nodes)


def test_rotated_grid_weakly_singular_integral(rng):
    """Test int 1/|w - p| dsigma(w) = 4 pi with the singularity at the pole."""
    pole = random_unit_points(rng, 1)[0]
    grid = rotated_grid(pole, 48, 96)
    value = integrate(lambda w: 1.0 / np.linalg.norm(w - pole, axis=1), grid)
    assert value.real == pytest.approx(4 * math.pi, rel=1e-12)


@pytest.mark.parametrize("k", [0, 1, 4])
def test_single_layer_eigenvalues_by_quadrature(k, rng):
    """Test S[Y_{k,l}] = -1/(2k+1) Y_{k,l} on the unit sphere."""
    pole = random_unit_points(rng, 1)[0]
    grid = rotated_grid(pole, 48, 96)
    l = min(k, 1)  # noqa: E741
    column = position(k, l)
    value = integrate(
        lambda w: -solid_harmonics(w, k)[:, column] / (4 * math.pi * np.linalg.norm(w - pole, axis=1)),
        grid,
    )
    expected = sphere_single_layer_eigenvalue(k) * eval_y((k, l), pole)
    assert abs(value - expected) <= 1e-8


def test_rotated_grid_matches_product_grid(rng):
    """Test a smooth integrand gives the same value on rotated and product grids."""
    product = integrate(smooth, build_grid(24, 48))
    assert product.real == pytest.approx(SMOOTH_INTEGRAL, rel=1e-13)
    for pole in random_unit_points(rng, 3):
        assert abs(integrate(smooth, rotated_grid(pole, 24, 48)) - product) <= 1e-12


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_integrate_is_rotation_invariant(seed):
    """Test int f(R w) dsigma = int f(w) dsigma for random rotations R."""
    grid = build_grid(24, 48)
    r = Rotation.random(random_state=seed).as_matrix()
    rotated = integrate(lambda w: smooth(w @ r.T), grid)
    assert abs(rotated - integrate(smooth, grid)) <= 1e-12
