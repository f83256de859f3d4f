"""
Shared helpers that turn a LabConfig into service inputs
"""

import tomllib
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from app.core import ConfigError, describe_validation_error
from app.models import FieldState, Grid, LabConfig, ModelParams, StepConfig
from app.services import DatumService, SpectralService


def load_config(path: Union[str, Path]) -> LabConfig:
    """
    Parse a TOML experiment file

    Raises:
        ConfigError: If the file is missing, not TOML, or fails validation
    """
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path} is not valid TOML: {exc}")
    return parse_config(data)


def parse_config(data: dict) -> LabConfig:
    try:
        return LabConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(describe_validation_error(exc))


def get_params(config: LabConfig) -> ModelParams:
    try:
        return config.model.to_params()
    except ValidationError as exc:
        raise ConfigError(describe_validation_error(exc, "model"))


def get_step(config: LabConfig, dt: float | None = None) -> StepConfig:
    try:
        step = config.step.to_step()
    except ValidationError as exc:
        raise ConfigError(describe_validation_error(exc, "step"))
    return step if dt is None else step.model_copy(update={"dt": dt})


def get_grid(config: LabConfig) -> Grid:
    return SpectralService.make_grid(config.grid.n, config.grid.length)


def get_datum(config: LabConfig) -> FieldState:
    return DatumService.build(config)
