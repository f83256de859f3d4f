from functools import cached_property
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# =========================
# GRID
# =========================
class Grid(BaseModel):
    """Periodic grid on [-L/2, L/2) with its FFT frequency ladder"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=16)
    length: float = Field(gt=0)

    @field_validator("n")
    @classmethod
    def n_power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError("n must be a power of two")
        return value

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def points(self) -> np.ndarray:
        return -self.length / 2 + self.dx * np.arange(self.n)

    @cached_property
    def frequencies(self) -> np.ndarray:
        # ξ_m = 2π m / L in standard FFT order
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def max_frequency(self) -> float:
        return np.pi * self.n / self.length

    def matches(self, other: "Grid") -> bool:
        return self.n == other.n and self.length == other.length


# =========================
# FIELD SNAPSHOTS
# =========================
class FieldState(BaseModel):
    """One complex snapshot u(t, ·) sampled on a grid"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray
    time: float = 0.0

    @field_validator("values", mode="before")
    @classmethod
    def as_complex_array(cls, value) -> np.ndarray:
        array = np.array(value, dtype=complex)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_samples(self) -> "FieldState":
        if self.values.shape != (self.grid.n,):
            raise ValueError(f"values must have shape ({self.grid.n},), got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains NaN or Inf samples")
        return self

    def with_values(self, values: np.ndarray, time: Optional[float] = None) -> "FieldState":
        """Same grid, new samples (and optionally a new time)"""
        return FieldState(grid=self.grid, values=values, time=self.time if time is None else time)

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)
