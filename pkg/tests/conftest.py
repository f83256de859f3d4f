import math
import textwrap

import numpy as np
import pytest

from app.models import ModelParams, NonlinearitySign, StepConfig
from app.services import SpectralService


@pytest.fixture
def torus():
    """n=256 on [-π, π): integer frequencies, j_max = 6"""
    return SpectralService.make_grid(256, 2 * math.pi)


@pytest.fixture
def line():
    """n=256 on [-20, 20): room for decaying data"""
    return SpectralService.make_grid(256, 40.0)


@pytest.fixture
def ladder(torus):
    return SpectralService.make_ladder(torus)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def gdnls():
    return ModelParams(sigma=1.0, sign=NonlinearitySign.GDNLS)


@pytest.fixture
def step():
    return StepConfig(dt=1e-3, record_every=10)


@pytest.fixture
def gaussian(line):
    def build(amplitude: float = 0.5, width: float = 2.0):
        return SpectralService.field(line, amplitude * np.exp(-(line.points / width) ** 2))

    return build


@pytest.fixture
def write_config(tmp_path):
    """Write a TOML experiment file and return its path"""
    def write(text: str, name: str = "experiment.toml"):
        path = tmp_path / name
        path.write_text(textwrap.dedent(text), encoding="utf-8")
        return path

    return write
