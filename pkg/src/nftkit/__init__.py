"""Nonlinear Fourier transform toolkit for the focusing NLS equation."""

__version__ = "0.1.0"
