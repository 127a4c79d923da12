"""Tests for the perturbed-sphere geometry and the shape model."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.spatial.transform import Rotation

from npspec.models.shape import ShapeSpec
from npspec.services.base import GeometryError
from npspec.services.geometry import (
    complex_coefficients,
    ensure_star_shaped,
    eval_a,
    frame,
    rotate_shape,
    surface_area,
    tangential_part,
)
from npspec.services.harmonics import SpherePoint, eval_real_y, position
from tests.conftest import CONSTANT_ONE, random_shape, random_unit_points

# --- Shape Model Tests ---


def test_shape_from_json_alias(tmp_path):
    """Test the file form {h, a: [...]} loads."""
    path = tmp_path / "y20.json"
    path.write_text('{"h": 0.05, "a": [{"k": 2, "l": 0, "coeff": 1.0}]}')
    shape = ShapeSpec.from_file(path)
    assert shape.h == 0.05
    assert shape.degree == 2
    assert shape.coeffs[0].coeff == 1.0


def test_shape_rejects_duplicates_and_bad_orders():
    """Test invalid term lists are schema errors."""
    with pytest.raises(ValidationError):
        ShapeSpec(h=0.1, a=[{"k": 1, "l": 0, "coeff": 1.0}, {"k": 1, "l": 0, "coeff": 2.0}])
    with pytest.raises(ValidationError):
        ShapeSpec(h=0.1, a=[{"k": 1, "l": 3, "coeff": 1.0}])
    with pytest.raises(ValidationError):
        ShapeSpec(h=float("nan"))


def test_empty_shape_file_is_schema_error(tmp_path):
    """Test an empty file raises a validation error."""
    path = tmp_path / "empty.json"
    path.write_text("")
    with pytest.raises(ValidationError):
        ShapeSpec.from_file(path)


def test_with_amplitude_keeps_field():
    """Test with_amplitude changes only h."""
    shape = ShapeSpec.from_terms(0.1, {(3, -1): 0.5})
    other = shape.with_amplitude(-0.2)
    assert other.h == -0.2
    assert other.coeffs == shape.coeffs


# --- Field Tests ---


def test_eval_a_matches_real_harmonics(rng):
    """Test a = sum alpha Y^real."""
    shape = ShapeSpec.from_terms(0.1, {(2, 1): 0.3, (3, -2): -1.2})
    omega = random_unit_points(rng, 8)
    expected = 0.3 * eval_real_y((2, 1), omega) - 1.2 * eval_real_y((3, -2), omega)
    np.testing.assert_allclose(eval_a(shape, omega), expected, atol=1e-14)


def test_complex_coefficients_are_conjugate_symmetric(rng):
    """Test c_{k,-l} = (-1)^l conj(c_{k,l}) for a real field."""
    c = complex_coefficients(random_shape(rng, 4))
    for k in range(5):
        for l in range(-k, k + 1):  # noqa: E741
            assert c[position(k, -l)] == pytest.approx((-1) ** l * np.conj(c[position(k, l)]), abs=1e-15)


# --- Frame Tests ---


def test_frame_unit_sphere():
    """Test h = 0 gives point = normal = omega and unit area weight."""
    omega = SpherePoint.from_angles(1.1, 0.3)
    result = frame(ShapeSpec(h=0.0), omega)
    np.testing.assert_allclose(result.point, omega.xyz, atol=1e-15)
    np.testing.assert_allclose(result.normal, omega.xyz, atol=1e-15)
    assert result.area_weight == pytest.approx(1.0)


def test_frame_dilated_sphere(rng, dilation_shape):
    """Test a identically 1 scales points by 1 + h and area by (1 + h)^2."""
    omega = random_unit_points(rng, 10)
    result = frame(dilation_shape, omega)
    np.testing.assert_allclose(result.point, 1.2 * omega, atol=1e-14)
    np.testing.assert_allclose(result.normal, omega, atol=1e-14)
    np.testing.assert_allclose(result.area_weight, 1.44, atol=1e-14)


def test_frame_normal_is_orthogonal_to_surface(rng):
    """Test the normal is a unit vector orthogonal to finite-difference tangents."""
    shape = random_shape(rng, 3, h=0.1)
    omega = random_unit_points(rng, 5)
    result = frame(shape, omega)
    np.testing.assert_allclose(np.linalg.norm(result.normal, axis=1), 1.0, atol=1e-14)
    step = 1e-6
    for direction in rng.normal(size=(3, 3)):
        tangent_dir = tangential_part(np.broadcast_to(direction, omega.shape), omega)
        moved = omega + step * tangent_dir
        moved /= np.linalg.norm(moved, axis=1, keepdims=True)
        back = omega - step * tangent_dir
        back /= np.linalg.norm(back, axis=1, keepdims=True)
        tangent = (frame(shape, moved).point - frame(shape, back).point) / (2 * step)
        assert np.max(np.abs(np.sum(tangent * result.normal, axis=1))) < 1e-7


def test_frame_rotation_equivariance(rng):
    """Test frame(a o R^T)(R w) = R frame(a)(w)."""
    shape = random_shape(rng, 4, h=0.05)
    r = Rotation.random(random_state=7).as_matrix()
    rotated = rotate_shape(shape, r)
    omega = random_unit_points(rng, 20)
    original = frame(shape, omega)
    moved = frame(rotated, omega @ r.T)
    np.testing.assert_allclose(moved.point, original.point @ r.T, atol=1e-10)
    np.testing.assert_allclose(moved.normal, original.normal @ r.T, atol=1e-10)
    np.testing.assert_allclose(moved.area_weight, original.area_weight, atol=1e-10)


def test_star_shape_violation():
    """Test max |h a| above the margin raises."""
    shape = ShapeSpec.from_terms(1.0, {(0, 0): CONSTANT_ONE})
    with pytest.raises(GeometryError):
        ensure_star_shaped(shape)
    with pytest.raises(GeometryError):
        frame(shape, (0.0, 0.0, 1.0))


def test_surface_area(dilation_shape):
    """Test the area of the unit and dilated spheres."""
    assert surface_area(ShapeSpec(h=0.0)) == pytest.approx(4 * math.pi, rel=1e-13)
    assert surface_area(dilation_shape) == pytest.approx(4 * math.pi * 1.44, rel=1e-13)


def sphere_points(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)


def parameter_tangents(shape, theta, phi, step=1e-5):
    """Central differences of (theta, phi) -> rho(w) w."""

    def surface(t, p):
        return frame(shape, sphere_points(t, p)).point

    d_theta = (surface(theta + step, phi) - surface(theta - step, phi)) / (2 * step)
    d_phi = (surface(theta, phi + step) - surface(theta, phi - step)) / (2 * step)
    return d_theta, d_phi


def test_frame_matches_parameter_differences(rng):
    """Test X_theta x X_phi = sin(theta) area_weight normal for X = rho w."""
    shape = random_shape(rng, 3, h=0.1)
    theta = rng.uniform(0.3, 2.8, size=10)
    phi = rng.uniform(0.0, 2 * math.pi, size=10)
    d_theta, d_phi = parameter_tangents(shape, theta, phi)
    result = frame(shape, sphere_points(theta, phi))
    expected = np.sin(theta)[:, None] * result.area_weight[:, None] * result.normal
    np.testing.assert_allclose(np.cross(d_theta, d_phi), expected, atol=1e-8)


def test_surface_area_of_random_shape(rng):
    """Test surface_area against a parameter-mesh area with finite-difference tangents."""
    shape = random_shape(rng, 3, h=0.1)
    nodes, weights = np.polynomial.legendre.leggauss(64)
    theta, phi = np.meshgrid(
        (nodes + 1) * math.pi / 2, 2 * math.pi * np.arange(128) / 128, indexing="ij"
    )
    d_theta, d_phi = parameter_tangents(shape, theta.ravel(), phi.ravel())
    density = np.linalg.norm(np.cross(d_theta, d_phi), axis=1).reshape(theta.shape)
    mesh_area = (math.pi / 2) * (2 * math.pi / 128) * float(np.sum(weights[:, None] * density))
    assert surface_area(shape) == pytest.approx(mesh_area, rel=1e-6)
