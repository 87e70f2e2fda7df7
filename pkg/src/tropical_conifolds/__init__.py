"""Exact-arithmetic toolkit for tropical manifolds and conifold transitions."""

__version__ = "0.1.0"
