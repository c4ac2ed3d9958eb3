"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ValidationError(ValueError):
    """Input data violates a structural invariant (e.g. lower > upper)."""


class FeatureError(NotImplementedError):
    """A valid request that this library deliberately does not support."""


class UnresolvedError(RuntimeError):
    """The numerical resolution is too coarse to certify the requested bound.

    ``achieved`` carries the best value reached (a bracket width, a bound, ...)
    so callers can decide how much finer to go.
    """

    def __init__(self, message, achieved=None, level=None):
        super().__init__(message)
        self.achieved = achieved
        self.level = level


class UncertifiedError(RuntimeError):
    """An operation needs a certified witness family but got one that is not."""
