# npspec/services/runs.py
"""
One entry point per command. Each returns a Report with a fixed column
order; the CLI writes it to CSV/JSON and the HTTP routes return it as is.
"""

import logging
from collections.abc import Sequence

import numpy as np

from npspec.models.config import GridSize
from npspec.models.results import Report
from npspec.models.shape import ShapeSpec
from npspec.services.np_operator import (
    AssemblyConfig,
    assemble,
    eigensolve,
    fd_multiplet_slopes,
    sphere_np_eigenvalue,
    track_multiplet,
)
from npspec.services.spectral_sums import (
    half_sum,
    zeta_closed_form,
    zeta_printed_variant,
    zeta_sphere,
)
from npspec.services.variation import plasmon_multiplet_slopes, variation_matrix
from npspec.settings import get_settings

logger = logging.getLogger(__name__)

DEFAULT_ZETA_KMAX = 1_000_000

SPECTRUM_COLUMNS = ["k", "slot", "lambda", "imag_residual"]
VARIATION_COLUMNS = ["l", "l_prime", "m_real", "m_imag"]
FD_COLUMNS = ["branch", "formula_slope", "fd_slope", "fd_raw_slope", "gap"]
ZETA_COLUMNS = [
    "p",
    "k_max",
    "partial_sum",
    "tail_bound",
    "estimate",
    "closed_form",
    "printed_variant",
    "bracketed",
    "printed_excluded",
]
HALFSUM_COLUMNS = ["h", "Lambda", "deviation", "max_value"]


def assembly_config(
    degree: int | None = None,
    grid: GridSize | None = None,
    inner_grid: GridSize | None = None,
    threads: int | None = None,
) -> AssemblyConfig:
    return AssemblyConfig.from_settings(degree=degree, outer=grid, inner=inner_grid, threads=threads)


def _shape_summary(shape: ShapeSpec) -> dict:
    return {"h": shape.h, "a": [t.model_dump() for t in shape.coeffs]}


def run_spectrum_analytic(kmax: int) -> Report:
    """Sphere eigenvalues 1/(2(2k+1)) with their multiplicities, k = 0..kmax."""
    rows = [
        {"k": k, "slot": slot, "lambda": sphere_np_eigenvalue(k), "imag_residual": 0.0}
        for k in range(kmax + 1)
        for slot in range(2 * k + 1)
    ]
    return Report(
        command="spectrum",
        summary={"source": "analytic", "kmax": kmax},
        columns=SPECTRUM_COLUMNS,
        rows=rows,
    )


def run_spectrum(shape: ShapeSpec, config: AssemblyConfig, kmax: int | None = None) -> Report:
    """Galerkin eigenvalues of a perturbed sphere grouped into multiplets k = 0..kmax."""
    kmax = config.degree if kmax is None else min(kmax, config.degree)
    system = assemble(shape, config)
    decomposition = eigensolve(system)
    rows = []
    deviation = 0.0
    for k in range(kmax + 1):
        multiplet = track_multiplet(system, k, decomposition)
        for slot, value in enumerate(multiplet.values):
            rows.append(
                {
                    "k": k,
                    "slot": slot,
                    "lambda": float(value),
                    "imag_residual": float(multiplet.residual_imag),
                }
            )
        deviation = max(deviation, float(np.max(np.abs(multiplet.values - sphere_np_eigenvalue(k)))))
    logger.info(f"Spectrum: {len(rows)} eigenvalues, max |imag| {decomposition.max_imag:.3e}")
    return Report(
        command="spectrum",
        summary={
            "source": "galerkin",
            "shape": _shape_summary(shape),
            "degree": config.degree,
            "kmax": kmax,
            "max_imag": decomposition.max_imag,
            "max_sphere_deviation": deviation,
            "gram_condition": system.gram_condition,
            "imag_within_tolerance": decomposition.max_imag <= get_settings().imag_tol,
        },
        columns=SPECTRUM_COLUMNS,
        rows=rows,
    )


def run_variation(shape: ShapeSpec, k: int, tol: float | None = None) -> Report:
    """Variation matrix M for the degree-k multiplet, its slopes and the equilibrium verdict."""
    tol = tol if tol is not None else get_settings().trace_tol
    result = variation_matrix(k, shape)
    rows = [
        {
            "l": i - k,
            "l_prime": j - k,
            "m_real": float(result.matrix[i, j].real),
            "m_imag": float(result.matrix[i, j].imag),
        }
        for i in range(2 * k + 1)
        for j in range(2 * k + 1)
    ]
    plasmon = plasmon_multiplet_slopes(result)
    passed = result.in_equilibrium(tol)
    logger.info(f"Variation k={k}: trace {result.trace:.3e}, pass={passed}")
    return Report(
        command="variation",
        summary={
            "shape": _shape_summary(shape),
            "k": k,
            "slopes": [float(s) for s in result.slopes],
            "trace": result.trace,
            "norm": result.norm,
            "hermitian_defect": result.hermitian_defect,
            "plasmon_slopes": [float(s) for s in plasmon],
            "plasmon_slope_sum": float(np.sum(plasmon)),
            "quadrature_exactness": result.exactness,
            "tol": tol,
            "pass": passed,
        },
        columns=VARIATION_COLUMNS,
        rows=rows,
    )


def run_fd_check(
    shape: ShapeSpec,
    k: int,
    h_values: Sequence[float],
    config: AssemblyConfig,
    tol: float | None = None,
) -> Report:
    """Formula slopes against Richardson-extrapolated finite-difference slopes."""
    settings = get_settings()
    tol = tol if tol is not None else settings.fd_gap_tol
    formula = variation_matrix(k, shape).slopes
    fd = fd_multiplet_slopes(shape, k, h_values, config)
    gaps = np.abs(formula - fd.branch)
    rows = [
        {
            "branch": i,
            "formula_slope": float(formula[i]),
            "fd_slope": float(fd.branch[i]),
            "fd_raw_slope": float(fd.raw_branch[i]),
            "gap": float(gaps[i]),
        }
        for i in range(2 * k + 1)
    ]
    max_gap = float(gaps.max())
    passed = max_gap <= tol and abs(fd.sum) <= settings.sum_slope_tol
    logger.info(f"FD check k={k}: max gap {max_gap:.3e}, sum slope {fd.sum:.3e}, pass={passed}")
    return Report(
        command="fd-check",
        summary={
            "shape": _shape_summary(shape),
            "k": k,
            "h_levels": list(fd.h_levels),
            "max_gap": max_gap,
            "sum_slope": fd.sum,
            "sum_slope_raw": fd.raw_sum,
            "tol": tol,
            "sum_slope_tol": settings.sum_slope_tol,
            "pass": passed,
        },
        columns=FD_COLUMNS,
        rows=rows,
    )


def run_zeta(p: float, k_max: int | None = None) -> Report:
    """
    Partial zeta sum of the sphere against both closed-form constants.

    The summary records which constant the partial-sum bracket accepts.
    """
    k_max = DEFAULT_ZETA_KMAX if k_max is None else k_max
    result = zeta_sphere(p, k_max)
    closed = zeta_closed_form(p)
    printed = zeta_printed_variant(p)
    upper = result.partial_sum + result.tail_bound

    def inside(value: float) -> bool:
        return result.partial_sum - 1e-14 <= value <= upper + 1e-14

    row = {
        "p": p,
        "k_max": k_max,
        "partial_sum": result.partial_sum,
        "tail_bound": result.tail_bound,
        "estimate": result.estimate,
        "closed_form": closed,
        "printed_variant": printed,
        "bracketed": inside(closed),
        "printed_excluded": not inside(printed),
    }
    return Report(
        command="zeta",
        summary={
            "closed_form_formula": "2^-p (1 - 2^(1-p)) zeta(p-1)",
            "printed_variant_formula": "2^-p (1 - 2^-p) zeta(p-1)",
            "printed_variant_gap": printed - closed,
            "estimate_error": abs(result.estimate - closed),
        },
        columns=ZETA_COLUMNS,
        rows=[row],
    )


def run_halfsum(shape: ShapeSpec, h_values: Sequence[float], config: AssemblyConfig) -> Report:
    """Lambda(h) table for the degree-1 multiplet and the fitted order of Lambda - 1/2."""
    result = half_sum(shape, h_values, config)
    rows = [
        {"h": r.h, "Lambda": r.total, "deviation": r.deviation, "max_value": r.max_value}
        for r in result.rows
    ]
    return Report(
        command="halfsum",
        summary={"shape": _shape_summary(shape), "order": result.order},
        columns=HALFSUM_COLUMNS,
        rows=rows,
    )
