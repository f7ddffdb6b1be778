"""Structural sensitivity analysis of chemical reaction networks."""

__version__ = "0.1.0"
