from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.grid import Grid


class BlockKind(str, Enum):
    """Tipos de proyección de Littlewood-Paley"""
    LEQ0 = "leq0"          # P_{≤0}
    BLOCK = "block"        # P_j
    RANGE = "range"        # P_{[a,b]}
    GEQ = "geq"            # P_{≥j} = I - P_{<j}
    LT = "lt"              # P_{<k} = P_{≤0} + Σ_{0<j<k} P_j
    FATTENED = "fattened"  # P̃_j = P_{[j-w, j+w]}
    TAIL = "tail"          # P_{>j_max}


# =========================
# LADDER
# =========================
class LPLadder(BaseModel):
    """Sampled Littlewood-Paley multipliers for one grid"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid
    j_min: int = 0
    j_max: int = Field(ge=1)
    phi0: np.ndarray
    phi: np.ndarray  # shape (j_max + 1, n); row 0 duplicates phi0, row j is phi_j

    @model_validator(mode="after")
    def check_shapes(self) -> "LPLadder":
        if self.phi0.shape != (self.grid.n,):
            raise ValueError("phi0 must be sampled on the grid frequencies")
        if self.phi.shape != (self.j_max + 1, self.grid.n):
            raise ValueError("phi must hold one row per block 0..j_max")
        return self

    def block(self, j: int) -> np.ndarray:
        return self.phi[j]


# =========================
# SELECTORS
# =========================
class BlockSelector(BaseModel):
    """Which projection lp_project applies"""
    model_config = ConfigDict(frozen=True)

    kind: BlockKind
    j: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    width: int = Field(default=3, ge=0)

    @classmethod
    def leq0(cls) -> "BlockSelector":
        return cls(kind=BlockKind.LEQ0)

    @classmethod
    def at(cls, j: int) -> "BlockSelector":
        return cls(kind=BlockKind.BLOCK, j=j)

    @classmethod
    def between(cls, a: int, b: int) -> "BlockSelector":
        return cls(kind=BlockKind.RANGE, a=a, b=b)

    @classmethod
    def geq(cls, j: int) -> "BlockSelector":
        return cls(kind=BlockKind.GEQ, j=j)

    @classmethod
    def below(cls, k: int) -> "BlockSelector":
        return cls(kind=BlockKind.LT, j=k)

    @classmethod
    def fattened(cls, j: int, width: int = 3) -> "BlockSelector":
        return cls(kind=BlockKind.FATTENED, j=j, width=width)

    @classmethod
    def tail(cls) -> "BlockSelector":
        return cls(kind=BlockKind.TAIL)
