"""Exact computations on classical, axial and planar transportation polytopes."""

__version__ = "0.1.0"
