"""Numerical homological mirror symmetry for elliptic curves."""

__version__ = "0.1.0"
