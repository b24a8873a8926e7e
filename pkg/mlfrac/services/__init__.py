"""Numerical services for the mlfrac library."""
