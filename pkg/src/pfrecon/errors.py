"""Exception hierarchy.  The CLI maps configuration errors to exit code 2 and
numerical failures to exit code 3."""


class PfreconError(Exception):
    """Base class for all package errors."""


class ConfigurationError(PfreconError, ValueError):
    """Invalid configuration or inconsistent inputs."""


class NumericalError(PfreconError, RuntimeError):
    """A computation failed for numerical reasons."""


class InstabilityError(NumericalError):
    """Time stepping produced non-finite values."""


class PositivityError(NumericalError):
    """A Laplace-domain field that must be positive was not."""


class SolverError(NumericalError):
    """A linear solve did not reach its tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
