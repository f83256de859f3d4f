from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.grid import FieldState, Grid
from app.models.params import ModelParams


# =========================
# LEDGER
# =========================
class LedgerRow(BaseModel):
    """Conserved quantities and norms of one snapshot"""
    model_config = ConfigDict(frozen=True)

    t: float
    mass: float
    momentum: float
    energy: float
    h1: float
    linf: float

    def as_row(self) -> list[float]:
        return [self.t, self.mass, self.momentum, self.energy, self.h1, self.linf]


LEDGER_HEADER = ["t", "mass", "momentum", "energy", "h1", "linf"]


# =========================
# TRAJECTORY
# =========================
class Trajectory(BaseModel):
    """Time-ordered snapshots with their ledger"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    states: List[FieldState]
    ledger: List[LedgerRow]
    params: ModelParams
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_ordering(self) -> "Trajectory":
        if not self.states:
            raise ValueError("a trajectory needs at least one snapshot")
        if len(self.ledger) != len(self.states):
            raise ValueError("ledger row count must equal snapshot count")
        times = np.array([state.time for state in self.states])
        if np.any(np.diff(times) <= 0):
            raise ValueError("snapshot times must be strictly increasing")
        return self

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    @property
    def times(self) -> np.ndarray:
        return np.array([state.time for state in self.states])

    @property
    def final(self) -> FieldState:
        return self.states[-1]

    def stack(self) -> np.ndarray:
        """Samples as an array of shape (snapshots, n)"""
        return np.stack([state.values for state in self.states])


class PicardResult(BaseModel):
    """Iterates u^(0..N) of the frozen-coefficient scheme and their differences"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    iterates: List[Trajectory]
    differences: List[float]  # d_n = ||u^(n+1) - u^(n)||_{L^inf_T L^2}

    @property
    def ratios(self) -> List[float]:
        return [
            later / earlier if earlier > 0 else 0.0
            for earlier, later in zip(self.differences[:-1], self.differences[1:])
        ]
