"""
Custom exception hierarchy for mlbgg.

All exceptions inherit from MLBGGError for easy catching. The CLI maps the
three top-level families (configuration, runtime, self-test) onto distinct
exit codes.
"""

from typing import Any, Dict, Optional


class MLBGGError(Exception):
    """Base exception for all mlbgg errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """
        Initialize exception.

        Args:
            message: Error message
            details: Additional error details
        """
        self.message = message
        self.details = details or {}
        super().__init__(message)


# Configuration Errors


class ConfigurationError(MLBGGError):
    """Raised when a scenario or experiment configuration is invalid."""

    pass


class MissingConfigError(ConfigurationError):
    """Raised when the configuration file cannot be found or read."""

    pass


class SchemaError(ConfigurationError):
    """Raised when a configuration document violates the schema.

    ``details["errors"]`` holds one ``{"field": dotted.path, "message": ...}``
    entry per violation.
    """

    pass


# Parameter and Invariant Errors


class ParameterError(MLBGGError):
    """Raised when a numeric parameter is outside its admissible range."""

    pass


class CoverageError(MLBGGError):
    """Raised when an event stream does not cover the observation schedule."""

    pass


class DimensionError(MLBGGError):
    """Raised when paired sequences have mismatched lengths."""

    pass


class PathInvariantError(MLBGGError):
    """Raised when a cumulative path decreases."""

    pass


# Estimation Errors


class EstimationError(MLBGGError):
    """Base exception for Monte Carlo estimation errors."""

    pass


class EmptyInputError(EstimationError):
    """Raised when an estimator receives no eligible samples."""

    pass


# Optimization Errors


class OptimizationError(MLBGGError):
    """Base exception for optimizer errors."""

    pass


class EmptyGridError(OptimizationError):
    """Raised when a sweep range or grid is empty."""

    pass


# Self-test and Output Errors


class SelfTestFailure(MLBGGError):
    """Raised when a self-test property fails."""

    pass


class OutputError(MLBGGError):
    """Raised when report or CSV files cannot be written."""

    pass
