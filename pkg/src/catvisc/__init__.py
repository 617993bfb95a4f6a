"""Viscosity iteration for nonexpansive maps on CAT(kappa) spaces."""

__version__ = "0.1.0"
