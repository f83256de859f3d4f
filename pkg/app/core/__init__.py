"""
Core module exports
"""

from .config import settings, Settings
from .exceptions import (
    ErrorStatus,
    LabException,
    GridError,
    FieldError,
    ParameterError,
    BranchError,
    IntegrationError,
    ConvergenceError,
    ConfigError,
    ResourceError,
    describe_validation_error,
)


__all__ = [
    # Config
    "settings",
    "Settings",

    # Errors
    "ErrorStatus",
    "LabException",
    "GridError",
    "FieldError",
    "ParameterError",
    "BranchError",
    "IntegrationError",
    "ConvergenceError",
    "ConfigError",
    "ResourceError",
    "describe_validation_error",
]
