"""
Leyes de evolución y funcionales de la familia gDNLS / DNLSb
"""

import logging
from typing import Optional

import numpy as np
from scipy import fft as sfft

from app.core import FieldError, ParameterError
from app.models import FieldState, Grid, LedgerRow, ModelParams
from app.services.spectral_service import SpectralService

logger = logging.getLogger(__name__)


class ModelService:
    """Servicio para leyes de evolución y cantidades conservadas"""

    # =========================
    # NONLINEARITY
    # =========================
    @staticmethod
    def eta(p: ModelParams, t: float) -> float:
        """Corte temporal en t; 1 si el modelo no está regularizado"""
        if p.regularization is None:
            return 1.0
        return float(p.regularization.eta.evaluate(t))

    @staticmethod
    def _truncate(grid: Grid, density: np.ndarray, p: ModelParams) -> np.ndarray:
        if p.regularization is None:
            return density
        multiplier = SpectralService.low_pass_multiplier(grid, p.regularization.k)
        return np.real(sfft.ifft(multiplier * sfft.fft(density)))

    @staticmethod
    def coefficients(grid: Grid, values: np.ndarray, p: ModelParams, t: float) -> tuple[np.ndarray, np.ndarray]:
        """
        Coeficientes de transporte y potencia (a, q) de la no linealidad

        a = |u|^{2σ} y q = |u|^{4σ}; con regularización ambos pasan a η(t)·P_{<k}(·).

        Returns:
            Arreglos reales (a, q) sobre la malla
        """
        modulus = np.abs(values)
        transport = modulus ** (2 * p.sigma)
        power = modulus ** (4 * p.sigma) if p.b != 0 else np.zeros(grid.n)
        if p.regularization is None:
            return transport, power
        eta = ModelService.eta(p, t)
        if eta == 0.0:
            return np.zeros(grid.n), np.zeros(grid.n)
        return eta * ModelService._truncate(grid, transport, p), eta * ModelService._truncate(grid, power, p)

    @staticmethod
    def nonlinearity_values(grid: Grid, values: np.ndarray, p: ModelParams, t: float) -> np.ndarray:
        """N(u) con u_t = i u_xx + N(u): N = -sign·a·u_x + i b q u"""
        if not p.nonlinear:
            return np.zeros(grid.n, dtype=complex)
        transport, power = ModelService.coefficients(grid, values, p, t)
        u_x = SpectralService.derivative_values(grid, values)
        result = -int(p.sign) * transport * u_x
        if p.b != 0:
            result = result + 1j * p.b * power * values
        return result

    @staticmethod
    def nonlinearity(u: FieldState, p: ModelParams, t: float) -> FieldState:
        """
        Parte no lineal del lado derecho

        Args:
            u: Instantánea actual
            p: Parámetros del modelo
            t: Tiempo, usado por el corte η si el modelo está regularizado

        Raises:
            FieldError: Si u o el resultado no son finitos
        """
        SpectralService.require_finite(u)
        values = ModelService.nonlinearity_values(u.grid, u.values, p, t)
        if not np.all(np.isfinite(values)):
            raise FieldError(f"nonlinearity produced non-finite samples at t={t}")
        return u.with_values(values)

    @staticmethod
    def rhs(u: FieldState, p: ModelParams, t: float) -> FieldState:
        """Lado derecho completo i u_xx + N(u)"""
        linear = 1j * SpectralService.derivative_values(u.grid, u.values, 2)
        return u.with_values(linear + ModelService.nonlinearity(u, p, t).values)

    @staticmethod
    def cfl_limit(u: FieldState, p: ModelParams) -> float:
        """Estimación advectiva Δx / max|u|^{2σ}"""
        peak = float(np.max(np.abs(u.values))) ** (2 * p.sigma)
        return np.inf if peak == 0 else u.grid.dx / peak

    # =========================
    # FUNCTIONALS
    # =========================
    @staticmethod
    def mass(u: FieldState) -> float:
        """M(u) = ½∫|u|²"""
        return 0.5 * float(np.sum(np.abs(u.values) ** 2)) * u.grid.dx

    @staticmethod
    def momentum(u: FieldState) -> float:
        """P(u) = ½ Re∫ i ū u_x"""
        u_x = SpectralService.derivative_values(u.grid, u.values)
        return 0.5 * float(np.real(np.sum(1j * np.conj(u.values) * u_x))) * u.grid.dx

    @staticmethod
    def energy(u: FieldState, p: ModelParams) -> float:
        """
        Hamiltoniano del flujo elegido por p

        E(u) = ½∫|u_x|² - sign/(2σ+2)·Re∫ i|u|^{2σ} ū u_x - b/(4σ+2)∫|u|^{4σ+2}

        Con sign=-1 y b=0 es la energía clásica de gDNLS.
        """
        sigma = p.sigma
        u_x = SpectralService.derivative_values(u.grid, u.values)
        modulus = np.abs(u.values)
        kinetic = 0.5 * np.sum(np.abs(u_x) ** 2)
        transport = np.real(np.sum(1j * modulus ** (2 * sigma) * np.conj(u.values) * u_x))
        potential = np.sum(modulus ** (4 * sigma + 2)) if p.b != 0 else 0.0
        total = kinetic - int(p.sign) / (2 * sigma + 2) * transport - p.b / (4 * sigma + 2) * potential
        return float(total) * u.grid.dx

    @staticmethod
    def h1_norm(u: FieldState) -> float:
        coefficients = sfft.fft(u.values)
        weights = 1.0 + u.grid.frequencies ** 2
        return float(np.sqrt(u.grid.length / u.grid.n ** 2 * np.sum(weights * np.abs(coefficients) ** 2)))

    @staticmethod
    def linf_norm(u: FieldState) -> float:
        return float(np.max(np.abs(u.values)))

    @staticmethod
    def ledger_row(u: FieldState, p: ModelParams) -> LedgerRow:
        return LedgerRow(
            t=u.time,
            mass=ModelService.mass(u),
            momentum=ModelService.momentum(u),
            energy=ModelService.energy(u, p),
            h1=ModelService.h1_norm(u),
            linf=ModelService.linf_norm(u),
        )

    # =========================
    # SCALING
    # =========================
    @staticmethod
    def critical_index(sigma: float) -> float:
        """s_c = 1/2 - 1/(2σ)"""
        if sigma <= 0:
            raise ParameterError(f"sigma must be positive, got {sigma}")
        return 0.5 - 0.5 / sigma

    @staticmethod
    def rescale(u: FieldState, lam: float, sigma: float, n: Optional[int] = None) -> FieldState:
        """
        u_λ(t, x) = λ^{1/(2σ)} u(λ²t, λx)

        Se conservan las muestras y el dominio se reduce a L/λ, así x'_m = x_m/λ se cumple
        exactamente; el tiempo de la instantánea pasa a t/λ². Con n, el resultado se
        remuestrea espectralmente.

        Raises:
            ParameterError: Si λ o σ no son positivos
            GridError: Si remuestrear a n pierde contenido más allá de Nyquist
        """
        if lam <= 0 or sigma <= 0:
            raise ParameterError(f"rescale needs lambda > 0 and sigma > 0, got lambda={lam}, sigma={sigma}")
        SpectralService.require_finite(u)
        grid = SpectralService.make_grid(u.grid.n, u.grid.length / lam)
        values = lam ** (1.0 / (2 * sigma)) * u.values
        scaled = SpectralService.field(grid, values, u.time / lam ** 2)
        if n is not None and n != grid.n:
            scaled = SpectralService.resample(scaled, n)
        return scaled
