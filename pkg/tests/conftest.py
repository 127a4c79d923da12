"""Pytest configuration and shared fixtures."""

import math

import httpx
import numpy as np
import pytest

from npspec.main import app
from npspec.models.shape import ShapeSpec
from npspec.services.np_operator import AssemblyConfig, assemble

# Coefficient of Y^real_{0,0} that makes a identically 1
CONSTANT_ONE = math.sqrt(4.0 * math.pi)

# Y_{2,0} = C20 (3 cos^2 theta - 1)
C20 = math.sqrt(5.0 / (16.0 * math.pi))

# Branch slopes of the degree-1 multiplet for a = Y^real_{2,0}
Y20_K1_SLOPES = (0.8 * C20, -0.4 * C20, -0.4 * C20)


def random_shape(rng: np.random.Generator, degree: int, h: float = 0.05) -> ShapeSpec:
    """Random real field of the given degree with max |a| of order one."""
    terms = {
        (k, l): float(rng.normal()) / (degree + 1)
        for k in range(degree + 1)
        for l in range(-k, k + 1)  # noqa: E741
    }
    return ShapeSpec.from_terms(h, terms)


def random_unit_points(rng: np.random.Generator, n: int) -> np.ndarray:
    pts = rng.normal(size=(n, 3))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


@pytest.fixture(scope="session")
def anyio_backend():
    """Use asyncio backend for async tests."""
    return "asyncio"


@pytest.fixture
def rng():
    """Seeded generator so random shapes are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_sphere():
    return ShapeSpec(h=0.0)


@pytest.fixture
def y20_shape():
    """a = Y^real_{2,0}; amplitude set per test."""
    return ShapeSpec.from_terms(0.05, {(2, 0): 1.0})


@pytest.fixture
def dilation_shape():
    """a identically 1: a dilated sphere."""
    return ShapeSpec.from_terms(0.2, {(0, 0): CONSTANT_ONE})


@pytest.fixture(scope="session")
def default_config():
    return AssemblyConfig.from_settings(threads=2)


@pytest.fixture(scope="session")
def sphere_system(default_config):
    """Galerkin system of the unit sphere at default resolution."""
    return assemble(ShapeSpec(h=0.0), default_config)


@pytest.fixture
async def test_client():
    """Create a test client for the FastAPI app."""
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://test") as client:
        yield client


@pytest.fixture
def shape_file(tmp_path):
    """Write a ShapeSpec to a JSON file and return its path."""

    def write(shape: ShapeSpec, name: str = "shape.json"):
        path = tmp_path / name
        path.write_text(shape.model_dump_json(by_alias=True), encoding="utf-8")
        return path

    return write
