"""Exception hierarchy. The CLI maps the three branches to exit codes 1/2/3."""


class GeogrowthError(Exception):
    """Base class for all package errors."""


class ConfigError(GeogrowthError):
    """Invalid configuration: bad parameter values, missing weights, unknown codes."""


class DataError(GeogrowthError):
    """Invalid or unusable input data."""


class EventParseError(DataError):
    """Malformed event JSON. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EventValidationError(DataError):
    """An event record violates a field invariant (strict parsing mode)."""

    def __init__(self, index: int, field: str, reason: str):
        self.index = index
        self.field = field
        self.reason = reason
        super().__init__(f"record {index}: {field}: {reason}")


class MissingColumnError(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"missing column: {column}")


class NumericalError(GeogrowthError):
    """Numerical failure: singular systems, non-convergence, degenerate inference."""


class SingularMatrixError(NumericalError):
    """Rank-deficient regressor matrix. Names the first offending column."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"regressor matrix is singular; offending column: {column}")


class ConvergenceError(NumericalError):
    def __init__(self, message: str, worst: float):
        self.worst = worst
        super().__init__(f"{message} (worst residual group mean {worst:.3e})")


class InferenceError(NumericalError):
    """Raised when resampling produces no usable replicates."""


class WeakInstrumentWarning(UserWarning):
    """First stage too weak for the ratio estimator to be reliable."""
