"""Exception types shared across the package."""


class ArksError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ArksError):
    """A scalar argument violates its documented range."""


class MisuseError(ArksError):
    """An operation was called in a configuration that does not support it."""


class ConfigError(ArksError):
    """Experiment configuration is invalid; message names the offending field."""


class SolverFailureError(ArksError):
    """An iterative solve did not converge within its iteration budget."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class CflViolation(ArksError):
    """Explicit drift step rejected; carries the largest admissible dt.

    Control-flow signal: the caller is expected to retry with ``admissible_dt``.
    """

    def __init__(self, admissible_dt):
        super().__init__(f"CFL violation, retry with dt <= {admissible_dt:.3e}")
        self.admissible_dt = admissible_dt


class InternalConsistencyError(ArksError):
    """A structural invariant (positivity, finiteness) broke; indicates a bug."""


class InvalidSeriesError(ArksError):
    """A time series does not satisfy the preconditions of a fit or check."""
