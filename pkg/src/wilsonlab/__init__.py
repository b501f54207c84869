"""Finite-model verification lab for multivariate Gabor and Wilson systems."""

__version__ = "0.1.0"
