# npspec/routers/spectra.py
import asyncio
import logging

from aiocache import cached
from fastapi import APIRouter, Query
from pydantic import BaseModel, Field, PositiveFloat

from npspec.models.config import GridSize
from npspec.models.results import Report
from npspec.models.shape import ShapeSpec
from npspec.services.runs import (
    DEFAULT_ZETA_KMAX,
    assembly_config,
    run_halfsum,
    run_spectrum,
    run_spectrum_analytic,
    run_variation,
    run_zeta,
)
from npspec.settings import settings

logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/api",
    tags=["Spectra"],
    responses={422: {"description": "Input outside the domain of the computation"}},
)

# Galerkin requests are dense O(L^4) solves; keep them desk-sized over HTTP.
MAX_HTTP_DEGREE = 12


# Request models
class SpectrumRequest(BaseModel):
    """Galerkin spectrum of a perturbed sphere."""

    shape: ShapeSpec
    degree: int = Field(settings.degree_cap, ge=1, le=MAX_HTTP_DEGREE, description="Degree cap L.")
    kmax: int | None = Field(None, ge=0, description="Last multiplet reported (default: L).")
    grid: GridSize | None = Field(None, description="Outer grid (default from settings).")
    inner_grid: GridSize | None = Field(None, description="Inner rotated grid (default from settings).")


class VariationRequest(BaseModel):
    """Variation matrix of one multiplet."""

    shape: ShapeSpec
    k: int = Field(..., ge=1, le=20, description="Multiplet degree.")
    tol: PositiveFloat | None = Field(None, description="Equilibrium tolerance override.")


class HalfSumRequest(BaseModel):
    """Degree-1 multiplet sum over a list of amplitudes."""

    shape: ShapeSpec
    h_values: list[float] = Field(..., min_length=1, max_length=8, description="Amplitudes h.")
    degree: int = Field(settings.degree_cap, ge=1, le=MAX_HTTP_DEGREE, description="Degree cap L.")


def request_key(f, *args, **kwargs) -> str:
    """Cache key from the JSON form of the request payload."""
    parts = [a.model_dump_json() if isinstance(a, BaseModel) else repr(a) for a in args]
    parts += [f"{k}={v!r}" for k, v in sorted(kwargs.items())]
    return f"{f.__name__}:{'|'.join(parts)}"


@cached(ttl=settings.cache_ttl, key_builder=request_key)
async def spectrum_report(request: SpectrumRequest) -> Report:
    config = assembly_config(request.degree, request.grid, request.inner_grid)
    return await asyncio.to_thread(run_spectrum, request.shape, config, request.kmax)


@cached(ttl=settings.cache_ttl, key_builder=request_key)
async def variation_report(request: VariationRequest) -> Report:
    return await asyncio.to_thread(run_variation, request.shape, request.k, request.tol)


@cached(ttl=settings.cache_ttl, key_builder=request_key)
async def halfsum_report(request: HalfSumRequest) -> Report:
    config = assembly_config(request.degree)
    return await asyncio.to_thread(run_halfsum, request.shape, request.h_values, config)


# --- API Endpoints ---


@router.get(
    "/spectrum/analytic",
    response_model=Report,
    summary="Sphere NP spectrum",
    description="Exact eigenvalues 1/(2(2k+1)) with multiplicity 2k+1.",
)
async def get_analytic_spectrum(
    kmax: int = Query(3, ge=0, le=200, description="Last degree reported."),
):
    return run_spectrum_analytic(kmax)


@router.post(
    "/spectrum",
    response_model=Report,
    summary="Galerkin spectrum of a perturbed sphere",
)
async def post_spectrum(request: SpectrumRequest):
    """
    Assembles the Galerkin matrix of K* on the perturbed sphere and groups its
    eigenvalues into multiplets. Results are cached per payload.
    """
    logger.info(f"Spectrum request: L={request.degree}, h={request.shape.h}")
    return await spectrum_report(request)


@router.post(
    "/variation",
    response_model=Report,
    summary="Multiplet variation matrix",
    description="First-order branch slopes of the degree-k multiplet and the equilibrium check.",
)
async def post_variation(request: VariationRequest):
    logger.info(f"Variation request: k={request.k}")
    return await variation_report(request)


@router.get(
    "/zeta",
    response_model=Report,
    summary="Spectral zeta sum of the sphere",
)
async def get_zeta(
    p: float = Query(..., description="Exponent, p > 2."),
    kmax: int = Query(DEFAULT_ZETA_KMAX, ge=0, le=10_000_000, description="Last degree summed."),
):
    """Partial sum with tail bound, checked against both closed-form constants."""
    return await asyncio.to_thread(run_zeta, p, kmax)


@router.post(
    "/halfsum",
    response_model=Report,
    summary="Degree-1 multiplet sum Lambda(h)",
)
async def post_halfsum(request: HalfSumRequest):
    logger.info(f"Half-sum request: h={request.h_values}")
    return await halfsum_report(request)
