"""Fourier pseudospectral Maxwell solver with active penalty boundaries."""

from .spectral import Grid, wavenumbers, spectral_derivative, project_divergence_free, interpolate

__all__ = ["Grid", "wavenumbers", "spectral_derivative", "project_divergence_free", "interpolate"]
__version__ = "0.1.0"
