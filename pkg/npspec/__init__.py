"""np-spectra - Neumann-Poincare spectra on spheres and radially perturbed spheres."""

__version__ = "1.0.0"
