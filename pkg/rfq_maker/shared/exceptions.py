"""
Custom Exceptions

Domain-specific exceptions for better error handling.
"""

from typing import Any, Dict, Optional


class RfqMakerException(Exception):
    """Base exception for RFQ Maker."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Structured form used by the CLI error report."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


class InvalidParameterError(RfqMakerException):
    """Raised when a domain type invariant is violated."""
    pass


class BracketError(RfqMakerException):
    """Raised when a 1-d maximization cannot bracket its optimum."""
    pass


class GridTooLargeError(RfqMakerException):
    """Raised when an exact solver is asked for an oversized inventory grid."""
    pass


class ReducibleChainError(RfqMakerException):
    """Raised when a policy induces a reducible inventory chain."""
    pass


class ConvergenceError(RfqMakerException):
    """Raised when an iterative solve fails to converge."""
    pass


class ConfigurationError(RfqMakerException):
    """Raised when a market or experiment configuration is invalid."""
    pass


class CheckpointError(RfqMakerException):
    """Raised when checkpoint operations fail."""
    pass


class ExperimentError(RfqMakerException):
    """Raised when an experiment request cannot be carried out."""
    pass
