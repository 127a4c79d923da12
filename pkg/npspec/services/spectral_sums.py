# npspec/services/spectral_sums.py
"""
Spectral sums of the NP operator: the zeta function of the sphere, its
Schatten norms, the h-derivative of zeta, and the degree-1 half-sum.

On the unit sphere the eigenvalue 1/(2(2k+1)) has multiplicity 2k+1, so

    zeta(p) = sum_k (2k+1) (2(2k+1))^{-p} = 2^{-p} sum_k (2k+1)^{1-p}
            = 2^{-p} (1 - 2^{1-p}) zeta_R(p - 1),

finite for p > 2.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import partial

import numpy as np
import scipy.special

from npspec.models.results import ZetaResult
from npspec.models.shape import ShapeSpec
from npspec.services.base import DivergenceError, DomainError
from npspec.services.np_operator import (
    AssemblyConfig,
    assemble,
    sphere_multiplet_sum,
    sphere_np_eigenvalue,
    track_multiplet,
)
from npspec.services.variation import equilibrium_check

logger = logging.getLogger(__name__)


def _check_exponent(p: float) -> None:
    if not p > 2.0:
        raise DivergenceError(f"spectral zeta diverges for p <= 2, got p={p}")


def zeta_sphere(p: float, k_max: int) -> ZetaResult:
    """
    Partial zeta sum over degrees 0..k_max with an integral-comparison tail bound.

    The summand (2k+1)^{1-p} is decreasing, so the omitted tail lies below
    int_{k_max}^inf (2x+1)^{1-p} dx. The estimate adds the midpoint integral
    from k_max + 1/2, which tracks the tail to O(k_max^{-p}).

    Raises:
        DivergenceError: If p <= 2.
    """
    _check_exponent(p)
    if k_max < 0:
        raise DomainError(f"k_max must be non-negative, got {k_max}")
    scale = 2.0**-p
    odd = 2.0 * np.arange(k_max, -1, -1, dtype=float) + 1.0  # smallest terms first
    partial_sum = scale * float(np.sum(odd ** (1.0 - p)))
    tail_bound = scale * (2 * k_max + 1) ** (2.0 - p) / (2.0 * (p - 2.0))
    tail_estimate = scale * (2 * k_max + 2) ** (2.0 - p) / (2.0 * (p - 2.0))
    return ZetaResult(
        p=p,
        k_max=k_max,
        partial_sum=partial_sum,
        tail_bound=tail_bound,
        estimate=partial_sum + tail_estimate,
    )


def zeta_closed_form(p: float) -> float:
    """2^{-p} (1 - 2^{1-p}) zeta_R(p - 1)."""
    _check_exponent(p)
    return float(2.0**-p * (1.0 - 2.0 ** (1.0 - p)) * scipy.special.zeta(p - 1.0))


def zeta_printed_variant(p: float) -> float:
    """
    Alternative constant 2^{-p} (1 - 2^{-p}) zeta_R(p - 1). Partial sums exclude
    it; reported next to the closed form.
    """
    _check_exponent(p)
    return float(2.0**-p * (1.0 - 2.0**-p) * scipy.special.zeta(p - 1.0))


def schatten_sphere(p: float) -> float:
    """tr (K* K)^{p/2} on the sphere; the eigenvalues are positive so it equals zeta(p)."""
    return zeta_closed_form(p)


TraceProvider = Callable[[int], float]


def _trace_provider(slopes: ShapeSpec | TraceProvider) -> TraceProvider:
    if isinstance(slopes, ShapeSpec):
        return partial(equilibrium_check, a=slopes)
    return slopes


def zeta_slope_terms(p: float, k_cut: int, slopes: ShapeSpec | TraceProvider) -> list[float]:
    """
    Per-degree terms p (1/(2(2k+1)))^{p-1} trace(M_k) for k = 1..k_cut.

    Args:
        p: Exponent, p > 2.
        k_cut: Last degree included.
        slopes: A perturbation field, or a callable returning the multiplet
            slope sum for a degree.
    """
    _check_exponent(p)
    if k_cut < 1:
        raise DomainError(f"k_cut must be at least 1, got {k_cut}")
    trace_of = _trace_provider(slopes)
    return [p * sphere_np_eigenvalue(k) ** (p - 1.0) * trace_of(k) for k in range(1, k_cut + 1)]


def zeta_slope_sphere(p: float, k_cut: int, slopes: ShapeSpec | TraceProvider) -> float:
    """Truncated d zeta / dh at h = 0; no claim is made about the full series."""
    total = math.fsum(zeta_slope_terms(p, k_cut, slopes))
    logger.info(f"d zeta/dh (p={p}, k <= {k_cut}): {total:.3e}")
    return total


# --- Half-sum experiment ---


@dataclass(frozen=True)
class HalfSumRow:
    """Degree-1 multiplet sum at one amplitude."""

    h: float
    total: float
    deviation: float
    max_value: float


@dataclass(frozen=True)
class HalfSumResult:
    rows: tuple[HalfSumRow, ...]
    order: float | None


def _fitted_order(rows: Sequence[HalfSumRow]) -> float | None:
    """Log-log slope of |deviation| against |h| over rows with h != 0."""
    usable = [(abs(r.h), abs(r.deviation)) for r in rows if r.h != 0.0 and r.deviation != 0.0]
    if len({h for h, _ in usable}) < 2:
        return None
    h, dev = np.log(np.array(usable)).T
    return float(np.polyfit(h, dev, 1)[0])


def half_sum(
    shape: ShapeSpec,
    h_values: Sequence[float],
    config: AssemblyConfig | None = None,
) -> HalfSumResult:
    """
    Lambda(h) = sum_l lambda_{1,l}(h) for each amplitude, and the fitted order
    of Lambda(h) - 1/2 in h.

    h = 0 is answered analytically; other amplitudes go through assembly and
    multiplet tracking. The amplitude stored in `shape` is ignored.

    Raises:
        DomainError: If h_values is empty.
        ClusterOverlapError: Propagated from multiplet tracking.
    """
    if not h_values:
        raise DomainError("half_sum needs at least one amplitude")
    rows = []
    for h in h_values:
        h = float(h)
        if h == 0.0:
            total, top = sphere_multiplet_sum(1), sphere_np_eigenvalue(1)
        else:
            multiplet = track_multiplet(assemble(shape.with_amplitude(h), config), 1)
            total, top = multiplet.total, float(multiplet.values[0])
        rows.append(HalfSumRow(h=h, total=total, deviation=total - 0.5, max_value=top))
        logger.info(f"Lambda({h}) = {total:.12f}")
    return HalfSumResult(rows=tuple(rows), order=_fitted_order(rows))
