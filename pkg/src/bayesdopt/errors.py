"""Exception hierarchy shared by the solver, the oracles and the CLI."""


class DesignError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DesignError, ValueError):
    """An input violates a documented invariant.

    ``field`` names the offending field path when one is known.
    """

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class ParseError(DesignError):
    """A problem file could not be parsed."""


class SingularInformation(DesignError):
    """An information matrix is not positive definite, so the criterion is -inf."""

    def __init__(self, message, prior_index=None):
        self.prior_index = prior_index
        super().__init__(message)


class BoundViolated(DesignError):
    """The overrelaxation parameter exceeds half the smallest sensitivity."""


class MonotonicityViolated(DesignError):
    """The criterion decreased between two consecutive iterates."""


class TooLarge(DesignError):
    """An enumeration oracle was asked for an instance beyond its limits."""


class Infeasible(DesignError):
    """Every candidate design has a singular information matrix."""


class SimplexDrift(MonotonicityViolated):
    """An iterate's weights no longer sum to one or went negative."""
