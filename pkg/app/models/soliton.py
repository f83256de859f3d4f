from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SolitonBranch(str, Enum):
    """Regiones de parámetros de la familia de solitones"""
    GENERIC = "generic-positive-gamma"
    ALGEBRAIC = "algebraic"
    NEGATIVE = "negative-gamma"


class SolitonSpec(BaseModel):
    """
    Traveling soliton u(t, x) = e^{iωt} Φ(x - ct) e^{iθ(x - ct)} of the DNLSb equation

    gamma and branch are derived; build instances through SolitonService.make_spec
    so both are consistent with (sigma, b, omega, c).
    """
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(gt=0)
    b: float = 0.0
    omega: float = Field(gt=0)
    c: float = 0.0
    gamma: float
    branch: SolitonBranch

    @model_validator(mode="after")
    def check_radicand(self) -> "SolitonSpec":
        if self.branch != SolitonBranch.ALGEBRAIC and self.c ** 2 + self.gamma * (4 * self.omega - self.c ** 2) <= 0:
            raise ValueError("c^2 + gamma*(4*omega - c^2) must be positive off the algebraic branch")
        return self

    @property
    def kappa(self) -> float:
        # sqrt(4ω - c²); zero on the algebraic branch
        return max(4 * self.omega - self.c ** 2, 0.0) ** 0.5
