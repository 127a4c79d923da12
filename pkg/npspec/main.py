# npspec/main.py
"""FastAPI application exposing the spectral computations as JSON."""

import logging
import sys
from contextlib import asynccontextmanager
from typing import Any, AsyncGenerator

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.gzip import GZipMiddleware
from fastapi.responses import JSONResponse

from npspec.log import configure_logging
from npspec.routers import spectra
from npspec.services.base import DomainError, GeometryError, NPSpecError
from npspec.settings import settings

configure_logging(stream=sys.stdout)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncGenerator[None, None]:
    logger.info(
        f"{settings.app_name} v{settings.app_version} up: L={settings.degree_cap}, "
        f"grids {settings.outer_theta}x{settings.outer_phi} / {settings.inner_theta}x{settings.inner_phi}, "
        f"{settings.threads} thread(s)"
    )
    yield
    logger.info("Shutdown complete")


app = FastAPI(
    title=settings.app_name,
    version=settings.app_version,
    description="Neumann-Poincare spectra of spheres and perturbed spheres",
    lifespan=lifespan,
    docs_url="/docs" if settings.debug else None,
    redoc_url="/redoc" if settings.debug else None,
    openapi_url="/openapi.json" if settings.debug else None,
)

# Spectrum reports can run to thousands of rows
app.add_middleware(GZipMiddleware, minimum_size=500)


def error_body(code: int, error: str, **fields: Any) -> JSONResponse:
    return JSONResponse(status_code=code, content={"error": error, **fields})


# --- Exception Handlers ---
@app.exception_handler(DomainError)
@app.exception_handler(GeometryError)
async def rejected_input(request: Request, exc: NPSpecError):
    """Poles, divergent exponents and non-star shapes are the caller's problem."""
    logger.warning(f"{request.url.path} rejected: {exc}")
    return error_body(status.HTTP_422_UNPROCESSABLE_ENTITY, type(exc).__name__, message=str(exc))


@app.exception_handler(NPSpecError)
async def numerical_failure(request: Request, exc: NPSpecError):
    """Quadrature blow-up, eigensolver failure, cluster overlap."""
    logger.error(f"{request.url.path} failed in {type(exc).__name__}: {exc}")
    return error_body(
        status.HTTP_500_INTERNAL_SERVER_ERROR, type(exc).__name__, message="The computation failed."
    )


@app.exception_handler(RequestValidationError)
async def invalid_request(request: Request, exc: RequestValidationError):
    # loc/msg/type only
    logger.warning(f"{request.url.path}: {len(exc.errors())} validation error(s)")
    details = [{key: e.get(key) for key in ("loc", "msg", "type")} for e in exc.errors()]
    return error_body(status.HTTP_422_UNPROCESSABLE_ENTITY, "Validation Error", details=details)


@app.exception_handler(Exception)
async def unexpected_failure(request: Request, exc: Exception):
    logger.exception(f"Unhandled exception on {request.url.path}")
    return error_body(
        status.HTTP_500_INTERNAL_SERVER_ERROR,
        "Internal Server Error",
        message="An unexpected error occurred.",
    )


@app.get("/health", tags=["Health"])
async def health_check():
    return {"status": "healthy", "version": settings.app_version}


app.include_router(spectra.router)


if __name__ == "__main__":
    from npspec.cli import serve

    serve("127.0.0.1", 8000)
