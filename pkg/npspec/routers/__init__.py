"""API routers for the spectral computations."""

from npspec.routers.spectra import router

__all__ = ["router"]
