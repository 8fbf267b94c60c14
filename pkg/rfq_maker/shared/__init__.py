"""
Shared Layer

Exceptions, logging setup and seeded random streams used across layers.
"""

from .exceptions import (
    RfqMakerException,
    InvalidParameterError,
    BracketError,
    GridTooLargeError,
    ReducibleChainError,
    ConvergenceError,
    ConfigurationError,
    CheckpointError,
    ExperimentError,
)
from .random_streams import RandomStreams
from .logging_setup import configure_logging

__all__ = [
    "RfqMakerException",
    "InvalidParameterError",
    "BracketError",
    "GridTooLargeError",
    "ReducibleChainError",
    "ConvergenceError",
    "ConfigurationError",
    "CheckpointError",
    "ExperimentError",
    "RandomStreams",
    "configure_logging",
]
