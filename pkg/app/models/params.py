from enum import IntEnum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import settings


class NonlinearitySign(IntEnum):
    """Convención de signo de la no linealidad"""
    GDNLS = -1   # iu_t + u_xx = i|u|^{2σ}u_x
    DNLSB = 1    # iu_t + u_xx + i|u|^{2σ}u_x + b|u|^{4σ}u = 0


# =========================
# TIME CUTOFF
# =========================
class TimeCutoff(BaseModel):
    """η(t): 1 on [-inner, inner], 0 outside (-outer, outer), cosine ramp between"""
    model_config = ConfigDict(frozen=True)

    inner: float = Field(default=1.0, gt=0)
    outer: float = Field(default=2.0, gt=0)

    @model_validator(mode="after")
    def check_order(self) -> "TimeCutoff":
        if self.outer <= self.inner:
            raise ValueError("outer must exceed inner")
        return self

    def evaluate(self, t) -> np.ndarray:
        """η(t), vectorised; cosine ramp on inner <= |t| <= outer"""
        a = np.abs(np.asarray(t, dtype=float))
        ramp = 0.5 * (1.0 + np.cos(np.pi * (a - self.inner) / (self.outer - self.inner)))
        return np.where(a <= self.inner, 1.0, np.where(a >= self.outer, 0.0, ramp))


class Regularization(BaseModel):
    """Frequency truncation P_{<k} and time cutoff η of the nonlinear coefficient"""
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    eta: TimeCutoff = Field(default_factory=TimeCutoff)


# =========================
# MODEL PARAMETERS
# =========================
class ModelParams(BaseModel):
    """Everything that defines the evolution law"""
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(gt=0)
    b: float = 0.0
    sign: NonlinearitySign = NonlinearitySign.GDNLS
    regularization: Optional[Regularization] = None
    nonlinear: bool = True
    unsafe_sigma: bool = False  # permite σ ≤ 1/2

    @model_validator(mode="after")
    def check_sigma(self) -> "ModelParams":
        if self.sigma <= 0.5 and not self.unsafe_sigma:
            raise ValueError(
                f"sigma={self.sigma} <= 1/2 makes |u|^(2 sigma) non-C^1; set unsafe_sigma to override"
            )
        return self

    def without_regularization(self) -> "ModelParams":
        return self.model_copy(update={"regularization": None})


# =========================
# TIME STEPPING
# =========================
class StepConfig(BaseModel):
    """Time step, dealiasing and snapshot cadence"""
    model_config = ConfigDict(frozen=True)

    dt: float = Field(gt=0)
    dealias: bool = True
    record_every: int = Field(default=1, ge=1)
    blowup_factor: float = Field(default_factory=lambda: settings.BLOWUP_FACTOR, gt=1)
