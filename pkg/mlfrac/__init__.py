"""Mittag-Leffler functions, their logarithms, and fractional logistic / epidemic models."""

__version__ = "1.0.0"
