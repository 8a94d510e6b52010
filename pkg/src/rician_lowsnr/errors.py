"""Exception hierarchy shared by the numeric modules and the CLI."""

from __future__ import annotations


class RicianError(Exception):
    """Base class for every error raised by rician_lowsnr."""


class DomainError(RicianError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidityError(DomainError):
    """An asymptotic form was evaluated outside its stated range.

    ``bound`` is the largest admissible SNR (linear), when one exists.
    """

    def __init__(self, message: str, bound: float | None = None):
        super().__init__(message)
        self.bound = bound


class QuadratureError(RicianError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (estimate={estimate:.6g}, error bound={error_bound:.3g})")
        self.estimate = estimate
        self.error_bound = error_bound


class BracketError(RicianError, ArithmeticError):
    """No sign change was found while expanding a root bracket."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message} (last bracket=[{bracket[0]:.6g}, {bracket[1]:.6g}])")
        self.bracket = bracket


class InvariantViolation(RicianError, ArithmeticError):
    """A property assumed by an algorithm (e.g. monotonicity) did not hold."""


class RegimeWarning(UserWarning):
    """An asymptotic expression was evaluated outside the low-SNR regime."""


class UsageError(RicianError, ValueError):
    """A command-line request is inconsistent (bad grid, unknown method, ...)."""
