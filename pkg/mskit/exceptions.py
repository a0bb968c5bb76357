"""Custom exception classes for the mskit package."""


class MskitError(Exception):
    """Base exception class for all mskit-related errors."""

    def __init__(self, message: str, details: str | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.details = details


class ConfigurationError(MskitError):
    """Exception raised for configuration-related errors."""

    pass


class ValidationError(MskitError):
    """Exception raised when a scenario or report fails schema validation."""

    def __init__(
        self, message: str, details: str | None = None, line: int | None = None, column: int | None = None
    ) -> None:
        super().__init__(message, details)
        self.line = line
        self.column = column


class CheckError(MskitError):
    """Exception raised when invariant checks cannot be discovered or executed."""

    pass


# Matrix kernel


class MatrixError(MskitError):
    """Exception raised by the dense matrix kernel."""

    pass


class NotHermitianError(MatrixError):
    pass


class NotPSDError(MatrixError):
    pass


class NotStrictContractionError(MatrixError):
    pass


class SingularMatrixError(MatrixError):
    pass


class NoConvergenceError(MatrixError):
    """A LAPACK decomposition failed to converge."""

    pass


class ShapeMismatchError(MatrixError):
    pass


class BadShapeError(MatrixError):
    pass


# Functions on the circle


class CircleFunctionError(MskitError):
    """Exception raised for sampled functions on the unit circle."""

    pass


class BadIndexError(CircleFunctionError):
    pass


class DegreeOverflowError(CircleFunctionError):
    pass


class GridError(CircleFunctionError):
    pass


# Inner functions


class InnerFunctionError(MskitError):
    """Exception raised when building or certifying inner functions."""

    pass


class BadDegreeError(InnerFunctionError):
    pass


class NotProjectionError(InnerFunctionError):
    pass


class ZeroTooLargeError(InnerFunctionError):
    pass


class NotPureError(InnerFunctionError):
    pass


class NotInnerError(InnerFunctionError):
    pass


# Model spaces


class ModelSpaceError(MskitError):
    """Exception raised for model space constructions."""

    pass


class PointTooCloseError(ModelSpaceError):
    pass


class InfiniteDimensionalError(ModelSpaceError):
    pass


class DeficientSpanError(ModelSpaceError):
    pass


class NotAnalyticError(ModelSpaceError):
    pass


# Crofoot transform


class CrofootError(MskitError):
    """Exception raised by the generalized Crofoot transform."""

    pass


class DimMismatchError(CrofootError):
    pass


class NotUnitaryError(CrofootError):
    pass
