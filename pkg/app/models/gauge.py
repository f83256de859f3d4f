import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import fft as sfft

from app.models.grid import Grid


class GaugePhase(BaseModel):
    """
    Φ(x) = ramp_slope·(x + L/2) + periodic_part(x) + offset

    periodic_part is the mean-zero spectral antiderivative (real samples); offset
    pins the base point Φ(-L/2) = 0.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid
    ramp_slope: float
    periodic_part: np.ndarray
    offset: float

    def values(self) -> np.ndarray:
        return self.ramp_slope * (self.grid.points + self.grid.length / 2) + self.periodic_part + self.offset

    def derivative(self) -> np.ndarray:
        """∂_xΦ: the ramp contributes its slope, the periodic part is differentiated spectrally"""
        xi = self.grid.frequencies
        return self.ramp_slope + np.real(sfft.ifft(1j * xi * sfft.fft(self.periodic_part)))

    def second_derivative(self) -> np.ndarray:
        xi = self.grid.frequencies
        return np.real(sfft.ifft(-(xi ** 2) * sfft.fft(self.periodic_part)))

    def scaled(self, factor: float) -> "GaugePhase":
        return GaugePhase(
            grid=self.grid,
            ramp_slope=factor * self.ramp_slope,
            periodic_part=factor * self.periodic_part,
            offset=factor * self.offset,
        )

    def boundary_mismatch(self) -> float:
        """Φ(L/2) - Φ(-L/2); the periodic part contributes nothing"""
        return self.ramp_slope * self.grid.length


class AmplitudeCutoffs(BaseModel):
    """φ_j(s) = φ(2^j s), χ_j = 1 - φ_j with φ = 1 on [-1, 1], 0 outside (-2, 2)"""
    model_config = ConfigDict(frozen=True)

    j: int = Field(ge=0)

    @staticmethod
    def bump(s: np.ndarray) -> np.ndarray:
        a = np.abs(np.asarray(s, dtype=float))
        ramp = 0.5 * (1.0 + np.cos(np.pi * (a - 1.0)))
        return np.where(a <= 1.0, 1.0, np.where(a >= 2.0, 0.0, ramp))

    def phi(self, s: np.ndarray) -> np.ndarray:
        return self.bump(2.0 ** self.j * np.asarray(s, dtype=float))

    def chi(self, s: np.ndarray) -> np.ndarray:
        return 1.0 - self.phi(s)
