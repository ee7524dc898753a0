"""Exception types raised across the package."""


class LagfracError(Exception):
    """Base class for all package errors."""


class DomainError(LagfracError, ValueError):
    """An argument lies outside the domain of the requested function."""


class IntegrationError(LagfracError, ArithmeticError):
    """A quadrature failed to converge or produced a non-finite value."""


class ConstructionError(LagfracError, ArithmeticError):
    """A quadrature rule could not be built."""


class TruncationError(LagfracError, ArithmeticError):
    """A truncated series cannot reach the requested tolerance.

    ``achieved`` carries the tail bound that was reached.
    """

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


class ConvergenceError(LagfracError, ArithmeticError):
    """Two independent evaluation routes disagree beyond tolerance."""

    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class ConfigError(LagfracError, ValueError):
    """An experiment configuration violates a parameter constraint."""
