"""Tests for error handling module."""

import logging

import pytest

from mskit.error_handling import ErrorHandler
from mskit.exceptions import (
    BadIndexError,
    CircleFunctionError,
    ConfigurationError,
    DimMismatchError,
    MskitError,
    NotPureError,
    ValidationError,
)


class TestErrorHandler:
    """Test cases for ErrorHandler."""

    def test_handle_error_with_mskit_error(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test handling of MskitError instances."""
        error = ConfigurationError("Config error", "Details about the error")

        with caplog.at_level(logging.ERROR):
            ErrorHandler.handle_error(error, "Test context")

        assert "Test context: Config error" in caplog.text

    def test_handle_error_with_mskit_error_and_details(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test handling of MskitError with details."""
        error = ValidationError("Bad scenario", "line 3, column 7")

        with caplog.at_level(logging.DEBUG):
            ErrorHandler.handle_error(error, "Test context")

        assert "Test context: Bad scenario" in caplog.text
        assert "Error details: line 3, column 7" in caplog.text

    def test_handle_error_with_generic_exception(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test handling of generic exceptions."""
        with caplog.at_level(logging.ERROR):
            ErrorHandler.handle_error(ValueError("Generic error"), "Test context")

        assert "Test context: Generic error" in caplog.text

    def test_handle_error_without_context(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test handling error without context."""
        with caplog.at_level(logging.ERROR):
            ErrorHandler.handle_error(ValueError("Generic error"))

        assert ": Generic error" in caplog.text

    def test_wrap_error_successful_execution(self) -> None:
        """Test wrap_error with successful function execution."""

        def test_func(x: int, y: int) -> int:
            return x + y

        wrapped_func = ErrorHandler.wrap_error(test_func, ConfigurationError, "Addition failed", "Math operation")

        assert wrapped_func(2, 3) == 5
        assert wrapped_func(x=1, y=4) == 5

    def test_wrap_error_exception_chaining(self, caplog: pytest.LogCaptureFixture) -> None:
        """Test that wrap_error converts and chains foreign exceptions."""

        def test_func() -> None:
            raise OSError("Disk on fire")

        wrapped_func = ErrorHandler.wrap_error(test_func, ValidationError, "Cannot read", "Loading scenario")

        with pytest.raises(ValidationError) as exc_info:
            wrapped_func()

        assert exc_info.value.message == "Cannot read"
        assert exc_info.value.details == "Disk on fire"
        assert isinstance(exc_info.value.__cause__, OSError)
        assert "Loading scenario: Disk on fire" in caplog.text

    def test_wrap_error_passes_mskit_errors_through(self) -> None:
        """Test that errors from the mskit hierarchy are not rewrapped."""

        def test_func() -> None:
            raise NotPureError("Inner function is not pure")

        wrapped_func = ErrorHandler.wrap_error(test_func, ValidationError, "Wrapped")

        with pytest.raises(NotPureError):
            wrapped_func()


class TestExceptions:
    """Test cases for the exception hierarchy."""

    def test_message_and_details(self) -> None:
        error = DimMismatchError("dims differ", "3 vs 4")
        assert str(error) == "dims differ"
        assert error.message == "dims differ"
        assert error.details == "3 vs 4"

    def test_validation_error_position(self) -> None:
        error = ValidationError("Malformed JSON", line=2, column=5)
        assert (error.line, error.column) == (2, 5)
        assert error.details is None

    def test_hierarchy(self) -> None:
        assert issubclass(BadIndexError, CircleFunctionError)
        assert issubclass(CircleFunctionError, MskitError)
        assert issubclass(ConfigurationError, MskitError)
        assert not issubclass(ValidationError, ConfigurationError)
