"""Symbolic and numerical toolkit for doubled phase space, two-time densities and thermofield vacua."""

__version__ = "0.1.0"
