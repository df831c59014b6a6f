"""Numerical lab for Gaussian analytic functions of bounded mean oscillation."""
__version__ = "0.1.0"
