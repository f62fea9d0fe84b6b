"""Exception and warning types shared across the package."""


class TRAError(Exception):
    """Base class for all errors raised by besseltra."""


class DomainError(TRAError, ValueError):
    """An argument lies outside the domain of the operation."""


class AccuracyError(TRAError, ArithmeticError):
    """A numerical method failed to reach the requested accuracy.

    The best available estimate is kept in ``partial`` so that callers can
    decide whether it is still usable.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class DegenerateError(TRAError, ValueError):
    """A recursion or model degenerates (vanishing leading coefficient, p=0, ...)."""


class SupercriticalError(TRAError, ValueError):
    """No real angular quantum number exists; a larger |m| is required."""


class NotFoundError(TRAError, LookupError):
    """A search (root, bracket, critical value) did not find its target."""


class ResolutionError(TRAError, ValueError):
    """A grid is too coarse for the requested finite-difference check."""


class AsymptoticTruncationWarning(UserWarning):
    """A divergent coefficient series was cut at its smallest term."""
