"""Exception hierarchy for the mlfrac services."""
from typing import Optional


class MLFracError(Exception):
    """Base class for every error raised by the mlfrac library."""


class DomainError(MLFracError, ValueError):
    """Argument lies outside the domain an operation supports."""


class PoleError(DomainError):
    """Gamma function evaluated at a non-positive integer."""


class GammaOverflowError(DomainError):
    """Gamma function argument too large for double precision."""


class MLOverflowError(DomainError):
    """Mittag-Leffler value (or its argument) exceeds the representable range."""


class NoConvergenceError(MLFracError):
    """Series hit its term cap before meeting the truncation tolerance."""

    def __init__(self, message: str, partial_sum: Optional[float] = None, terms_used: int = 0):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms_used = terms_used


class BracketError(MLFracError):
    """Root bracket could not be established for an inverse lookup."""


class ConvergenceDomainError(DomainError):
    """Series solution requested outside its region of convergence."""


class DivergenceError(MLFracError):
    """Numerical solution left the configured magnitude bound."""


class DegenerateModelError(DomainError):
    """Model parameters admit only the trivial solution."""


class MethodMismatchError(MLFracError):
    """Solution method is not defined for the requested model."""


class ConfigError(MLFracError):
    """Configuration file is not a flat key-value document."""
