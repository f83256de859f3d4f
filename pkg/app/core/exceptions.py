from enum import Enum
from typing import Optional

from pydantic import ValidationError


class ErrorStatus(str, Enum):
    """Categorías de error del laboratorio"""
    INVALID_INPUT = "invalid_input"
    OUT_OF_RANGE = "out_of_range"
    NOT_FINITE = "not_finite"
    NOT_CONVERGED = "not_converged"
    BLOW_UP = "blow_up"
    CONFIG = "config"
    RESOURCE = "resource"


class LabException(Exception):
    """
    Base error for every operation of the lab

    Args:
        detail: Human readable explanation
        status: Error category
    """

    status: ErrorStatus = ErrorStatus.INVALID_INPUT

    def __init__(self, detail: str, status: Optional[ErrorStatus] = None):
        super().__init__(detail)
        self.detail = detail
        if status is not None:
            self.status = status

    def __str__(self) -> str:
        return f"[{self.status.value}] {self.detail}"


class GridError(LabException):
    status = ErrorStatus.INVALID_INPUT


class FieldError(LabException):
    status = ErrorStatus.NOT_FINITE


class ParameterError(LabException):
    status = ErrorStatus.OUT_OF_RANGE


class BranchError(ParameterError):
    """Soliton parameters outside every branch region"""


class IntegrationError(LabException):
    status = ErrorStatus.BLOW_UP


class ConvergenceError(LabException):
    status = ErrorStatus.NOT_CONVERGED


class ConfigError(LabException):
    status = ErrorStatus.CONFIG


class ResourceError(LabException):
    status = ErrorStatus.RESOURCE


def describe_validation_error(exc: ValidationError, prefix: str = "") -> str:
    """Flatten a pydantic ValidationError into `field: message` lines"""
    lines = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err.get("loc", ()))
        if prefix:
            loc = f"{prefix}.{loc}" if loc else prefix
        lines.append(f"{loc}: {err.get('msg')}" if loc else err.get("msg", ""))
    return "; ".join(lines)
