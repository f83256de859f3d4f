"""
Datos iniciales para los experimentos
"""

import logging
import math
from typing import List

import numpy as np
from scipy import fft as sfft

from app.core import ParameterError, settings
from app.models import DatumSection, FieldState, Grid, LabConfig
from app.services.soliton_service import SolitonService
from app.services.spectral_service import SpectralService

logger = logging.getLogger(__name__)

DECAYING_KINDS = {"gaussian", "sech", "kink"}


class DatumService:
    """Servicio para construir datos iniciales"""

    @staticmethod
    def profile(grid: Grid, datum: DatumSection) -> np.ndarray:
        """Muestras del perfil [datum]; `random_h1` y `soliton` se construyen aparte"""
        x = grid.points
        y = (x - datum.center) / datum.width
        carrier = np.exp(1j * datum.wavenumber * x)
        if datum.kind == "zero":
            return np.zeros(grid.n, dtype=complex)
        if datum.kind == "gaussian":
            return datum.amplitude * np.exp(-(y ** 2)) * carrier
        if datum.kind == "sech":
            return datum.amplitude / np.cosh(y) * carrier
        if datum.kind == "kink":
            return datum.amplitude * np.exp(-np.abs(y)) * carrier
        if datum.kind == "plane_wave":
            mode = datum.wavenumber * grid.length / (2 * math.pi)
            if not math.isclose(mode, round(mode), abs_tol=1e-9):
                raise ParameterError(f"plane wave e^(i k x) with k={datum.wavenumber} is not periodic on L={grid.length}")
            return datum.amplitude * carrier
        raise ParameterError(f"datum kind '{datum.kind}' has no closed-form profile")

    @staticmethod
    def random_h1(grid: Grid, amplitude: float, decay: float, rng: np.random.Generator) -> FieldState:
        """Campo aleatorio con |û(ξ)| ~ <ξ>^{-decay}, limitado al rango 2/3 y escalado a ‖u‖_∞ = amplitude"""
        coefficients = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
        coefficients *= (1.0 + grid.frequencies ** 2) ** (-decay / 2) * SpectralService.dealias_mask(grid)
        values = sfft.ifft(coefficients)
        peak = float(np.max(np.abs(values)))
        if peak > 0:
            values *= amplitude / peak
        return SpectralService.field(grid, values)

    @staticmethod
    def ensemble(grid: Grid, count: int, amplitude: float, decay: float, seed: int) -> List[FieldState]:
        rng = np.random.default_rng(seed)
        return [DatumService.random_h1(grid, amplitude, decay, rng) for _ in range(count)]

    @staticmethod
    def build(config: LabConfig) -> FieldState:
        """u0 descrito por [grid], [datum] y, para solitones, [model] y [experiment]"""
        grid = SpectralService.make_grid(config.grid.n, config.grid.length)
        datum = config.datum
        if datum.kind == "random_h1":
            return DatumService.random_h1(grid, datum.amplitude, datum.decay, np.random.default_rng(datum.seed))
        if datum.kind == "soliton":
            spec = SolitonService.make_spec(
                config.model.sigma, config.model.b, config.experiment.omega, config.experiment.c
            )
            return SolitonService.soliton_field(spec, 0.0, grid)
        u0 = SpectralService.field(grid, DatumService.profile(grid, datum))
        if datum.kind in DECAYING_KINDS:
            edge = float(max(abs(u0.values[0]), abs(u0.values[-1])))
            if edge > settings.BOUNDARY_WARN:
                logger.warning(f"datum amplitude {edge:.3e} at the boundary exceeds {settings.BOUNDARY_WARN:.0e}")
        return u0
