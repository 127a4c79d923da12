"""Tests for spectral zeta sums, Schatten norms and the half-sum experiment."""

import math

import pytest

from npspec.models.shape import ShapeSpec
from npspec.services import spectral_sums
from npspec.services.base import DivergenceError, DomainError
from npspec.services.spectral_sums import (
    half_sum,
    schatten_sphere,
    zeta_closed_form,
    zeta_printed_variant,
    zeta_slope_sphere,
    zeta_slope_terms,
    zeta_sphere,
)
from npspec.services.variation import variation_matrix
from tests.conftest import CONSTANT_ONE, random_shape

# --- Zeta Tests ---


def test_zeta_closed_form_at_three():
    """Test 2^-3 (1 - 2^-2) zeta(2) = pi^2 / 64."""
    assert zeta_closed_form(3.0) == pytest.approx(math.pi**2 / 64, rel=1e-14)


def test_zeta_partial_sums_converge_to_closed_form():
    """Test the tail-corrected estimate at k_max = 10^6 matches the closed form."""
    result = zeta_sphere(3.0, 1_000_000)
    assert abs(result.estimate - math.pi**2 / 64) <= 1e-8
    assert abs(result.partial_sum - math.pi**2 / 64) <= result.tail_bound


@pytest.mark.parametrize("p", [2.5, 3.0, 4.0, 6.0])
@pytest.mark.parametrize("k_max", [1, 10, 1000, 1_000_000])
def test_partial_sums_bracket_closed_form(p, k_max):
    """Test partial_sum <= closed form <= partial_sum + tail_bound."""
    result = zeta_sphere(p, k_max)
    closed = zeta_closed_form(p)
    assert result.partial_sum - 1e-14 <= closed <= result.partial_sum + result.tail_bound + 1e-14
    # tail bounds fall below double precision for large p and k_max
    assert abs(result.estimate - closed) <= max(result.tail_bound, 1e-15)


@pytest.mark.parametrize("p", [2.5, 3.0, 4.0, 6.0])
def test_estimate_accuracy_at_large_cutoff(p):
    """Test the estimate is within 1e-8 of the closed form at k_max = 10^6."""
    assert abs(zeta_sphere(p, 1_000_000).estimate - zeta_closed_form(p)) <= 1e-8


def test_printed_variant_is_excluded():
    """Test the 2^-p (1 - 2^-p) constant lies far outside the partial-sum bracket."""
    printed = zeta_printed_variant(3.0)
    assert printed == pytest.approx(7 * math.pi**2 / 384, rel=1e-14)
    result = zeta_sphere(3.0, 1_000_000)
    assert printed - (result.partial_sum + result.tail_bound) > 0.02


def test_zeta_p_four():
    """Test p = 4 gives 2^-4 (1 - 2^-3) zeta(3)."""
    apery = 1.2020569031595942
    assert zeta_closed_form(4.0) == pytest.approx(2**-4 * (1 - 2**-3) * apery, rel=1e-14)


def test_zeta_dominated_by_first_term():
    """Test p = 20: the k = 0 term 2^-20 dominates."""
    assert abs(zeta_sphere(20.0, 10).partial_sum - 2**-20) <= 1e-6


def test_partial_sums_are_monotone():
    """Test partial sums grow with k_max."""
    sums = [zeta_sphere(3.0, k).partial_sum for k in range(0, 50, 5)]
    assert sums == sorted(sums)


def test_zeta_divergence():
    """Test p <= 2 raises a divergence (domain) error."""
    with pytest.raises(DivergenceError):
        zeta_sphere(2.0, 10)
    with pytest.raises(DomainError):
        zeta_closed_form(1.5)
    with pytest.raises(DivergenceError):
        schatten_sphere(2.0)


def test_schatten_equals_zeta():
    """Test the Schatten sum of the sphere equals its zeta value."""
    for p in (2.5, 3.0, 4.0):
        assert schatten_sphere(p) == zeta_closed_form(p)


# --- Zeta Slope Tests ---


def test_zeta_slope_vanishes(rng):
    """Test the truncated d zeta/dh is zero for a random field."""
    shape = random_shape(rng, 4)
    assert abs(zeta_slope_sphere(3.0, 3, shape)) <= 1e-8


def test_zeta_slope_terms_for_y20(y20_shape):
    """Test each degree contributes zero separately."""
    terms = zeta_slope_terms(3.0, 3, y20_shape)
    assert len(terms) == 3
    for k, term in enumerate(terms, start=1):
        scale = max(variation_matrix(k, y20_shape).norm, 1.0)
        assert abs(term) <= 1e-8 * scale


def test_zeta_slope_of_empty_field():
    """Test a identically 0 gives 0."""
    assert zeta_slope_sphere(3.0, 3, ShapeSpec(h=0.0)) == 0.0


def test_zeta_slope_with_trace_provider():
    """Test a callable provider is weighted by p lambda_k^(p-1)."""
    terms = zeta_slope_terms(3.0, 2, lambda k: 1.0)
    assert terms == pytest.approx([3 * (1 / 6) ** 2, 3 * (1 / 10) ** 2])
    with pytest.raises(DomainError):
        zeta_slope_terms(3.0, 0, lambda k: 1.0)


# --- Half-Sum Tests ---


def test_half_sum_at_zero_is_analytic(monkeypatch, y20_shape):
    """Test Lambda(0) = 1/2 exactly without any assembly."""

    def no_assembly(*args, **kwargs):
        raise AssertionError("h = 0 must not assemble")

    monkeypatch.setattr(spectral_sums, "assemble", no_assembly)
    result = half_sum(y20_shape, [0.0])
    assert result.rows[0].total == 0.5
    assert result.rows[0].deviation == 0.0
    assert result.rows[0].max_value == pytest.approx(1 / 6)
    assert result.order is None


def test_half_sum_needs_amplitudes(y20_shape):
    """Test an empty amplitude list raises."""
    with pytest.raises(DomainError):
        half_sum(y20_shape, [])


@pytest.mark.slow
def test_half_sum_dilation(default_config):
    """Test Lambda = 1/2 for a dilated sphere."""
    shape = ShapeSpec.from_terms(0.0, {(0, 0): CONSTANT_ONE})
    result = half_sum(shape, [0.1], default_config)
    assert abs(result.rows[0].deviation) <= 1e-6


@pytest.mark.slow
def test_half_sum_is_flat_at_first_order(y20_shape, default_config):
    """Test the fitted order of Lambda(h) - 1/2 is at least 1.9 for Y_{2,0}."""
    result = half_sum(y20_shape, [0.02, 0.04, 0.08], default_config)
    assert [r.h for r in result.rows] == [0.02, 0.04, 0.08]
    assert result.order is not None
    assert result.order >= 1.9
    for row in result.rows:
        assert row.max_value > 1 / 6
