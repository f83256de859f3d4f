"""
Solitones viajeros exactos de la ecuación DNLSb
iu_t + u_xx + i|u|^{2σ}u_x + b|u|^{4σ}u = 0
"""

import logging
import math

import numpy as np
from pydantic import ValidationError
from scipy.integrate import quad

from app.core import BranchError, ConvergenceError, GridError, describe_validation_error, settings
from app.models import FieldState, Grid, SolitonBranch, SolitonSpec
from app.services.spectral_service import SpectralService

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-12


class SolitonService:
    """Servicio para la familia explícita de solitones"""

    # =========================
    # PARAMETERS
    # =========================
    @staticmethod
    def gamma_of(sigma: float, b: float) -> float:
        """γ = 1 + (2σ+2)²/(2σ+1)·b"""
        return 1.0 + (2 * sigma + 2) ** 2 / (2 * sigma + 1) * b

    @staticmethod
    def classify_branch(sigma: float, b: float, omega: float, c: float) -> SolitonBranch:
        """
        Región de parámetros de (σ, b, ω, c)

        Raises:
            BranchError: Nombrando la desigualdad que falla
        """
        if sigma <= 0:
            raise BranchError(f"sigma must be positive, got {sigma}")
        if omega <= 0:
            raise BranchError(f"omega must be positive, got {omega}")
        gamma = SolitonService.gamma_of(sigma, b)
        edge = 2.0 * math.sqrt(omega)
        if gamma > 0:
            if math.isclose(c, edge, rel_tol=1e-12):
                return SolitonBranch.ALGEBRAIC
            if -edge < c < edge:
                return SolitonBranch.GENERIC
            raise BranchError(f"gamma={gamma:.6g} > 0 needs -2*sqrt(omega) < c <= 2*sqrt(omega), got c={c}")
        upper = -edge * math.sqrt(-gamma / (1.0 - gamma))
        if -edge < c < upper:
            return SolitonBranch.NEGATIVE
        raise BranchError(
            f"gamma={gamma:.6g} <= 0 needs -2*sqrt(omega) < c < -2*sqrt(-gamma/(1-gamma))*sqrt(omega) "
            f"= {upper:.6g}, got c={c}"
        )

    @staticmethod
    def make_spec(sigma: float, b: float, omega: float, c: float) -> SolitonSpec:
        branch = SolitonService.classify_branch(sigma, b, omega, c)
        try:
            return SolitonSpec(
                sigma=sigma, b=b, omega=omega, c=c, gamma=SolitonService.gamma_of(sigma, b), branch=branch
            )
        except ValidationError as exc:
            raise BranchError(describe_validation_error(exc, "soliton"))

    # =========================
    # PROFILES
    # =========================
    @staticmethod
    def amplitude_power(spec: SolitonSpec, x) -> np.ndarray:
        """Φ^{2σ}(x), la fórmula de la rama antes de la raíz 2σ"""
        x = np.asarray(x, dtype=float)
        sigma, c, gamma = spec.sigma, spec.c, spec.gamma
        if spec.branch == SolitonBranch.ALGEBRAIC:
            return 2 * (sigma + 1) * c / ((sigma * c * x) ** 2 + gamma)
        kappa2 = 4 * spec.omega - c ** 2
        discriminant = c ** 2 + gamma * kappa2
        if discriminant <= 0:
            raise BranchError(f"c^2 + gamma(4 omega - c^2) = {discriminant:.6g} must be positive")
        root = math.sqrt(discriminant)
        # A cosh z - c = 2A sinh²(z/2) + (A - c), with A - c rewritten to avoid cancellation for c > 0
        gap = gamma * kappa2 / (root + c) if c > 0 else root - c
        if gap <= 0:
            raise BranchError(f"soliton denominator is not positive (gap={gap:.6g})")
        z = spec.sigma * math.sqrt(kappa2) * x
        with np.errstate(over="ignore"):
            denominator = 2 * root * np.sinh(z / 2) ** 2 + gap
        return (sigma + 1) * kappa2 / denominator

    @staticmethod
    def amplitude_profile(spec: SolitonSpec, x) -> np.ndarray:
        """Φ_{ω,c}(x) >= 0"""
        return SolitonService.amplitude_power(spec, x) ** (1.0 / (2 * spec.sigma))

    @staticmethod
    def _power_scalar(spec: SolitonSpec):
        return lambda y: float(SolitonService.amplitude_power(spec, y))

    @staticmethod
    def tail_integral(spec: SolitonSpec, x) -> np.ndarray:
        """
        ∫_{-∞}^x Φ^{2σ}(y) dy por cuadratura adaptativa de Gauss-Kronrod

        La semirrecta hasta el menor punto usa el cambio de variable de QUADPACK
        para rangos infinitos; los demás puntos se alcanzan acumulando intervalos
        finitos en orden.

        Raises:
            ConvergenceError: Si algún tramo no alcanza la tolerancia absoluta
        """
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        if flat.size == 0:
            return np.zeros_like(x)
        integrand = SolitonService._power_scalar(spec)
        order = np.argsort(flat, kind="stable")
        ordered = flat[order]

        def piece(a: float, b: float) -> float:
            value, error = quad(integrand, a, b, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE, limit=200)
            if error > 1e3 * QUAD_TOLERANCE * max(1.0, abs(value)):
                raise ConvergenceError(f"tail integral on [{a}, {b}] did not converge (error {error:.3e})")
            return value

        increments = np.empty(ordered.size)
        increments[0] = piece(-np.inf, ordered[0])
        for m in range(1, ordered.size):
            increments[m] = piece(ordered[m - 1], ordered[m]) if ordered[m] > ordered[m - 1] else 0.0
        result = np.empty(ordered.size)
        result[order] = np.cumsum(increments)
        return result.reshape(x.shape)

    @staticmethod
    def phase_profile(spec: SolitonSpec, x) -> np.ndarray:
        """θ_{ω,c}(x) = c/2·x - (1/(2σ+2))∫_{-∞}^x Φ^{2σ}"""
        x = np.asarray(x, dtype=float)
        return spec.c / 2 * x - SolitonService.tail_integral(spec, x) / (2 * spec.sigma + 2)

    @staticmethod
    def phase_derivative(spec: SolitonSpec, x) -> np.ndarray:
        return spec.c / 2 - SolitonService.amplitude_power(spec, x) / (2 * spec.sigma + 2)

    # =========================
    # FIELDS
    # =========================
    @staticmethod
    def profile_field(spec: SolitonSpec, grid: Grid, t: float = 0.0) -> np.ndarray:
        """φ_{ω,c}(y) = Φ(y)e^{iθ(y)} en y = x - ct reducido al toro"""
        half = grid.length / 2
        y = np.mod(grid.points - spec.c * t + half, grid.length) - half
        return SolitonService.amplitude_profile(spec, y) * np.exp(1j * SolitonService.phase_profile(spec, y))

    @staticmethod
    def check_boundary(spec: SolitonSpec, grid: Grid) -> float:
        """
        Φ en el borde del dominio

        Raises:
            GridError: Si un solitón genérico o de γ negativo no decae por debajo del límite
        """
        edge = float(SolitonService.amplitude_profile(spec, grid.length / 2))
        if spec.branch == SolitonBranch.ALGEBRAIC:
            logger.warning(f"algebraic soliton has boundary amplitude {edge:.3e}; results are qualitative only")
            return edge
        if edge >= settings.SOLITON_BOUNDARY_MAX:
            raise GridError(
                f"soliton amplitude {edge:.3e} at x=L/2 exceeds {settings.SOLITON_BOUNDARY_MAX:.0e}; enlarge L"
            )
        return edge

    @staticmethod
    def soliton_field(spec: SolitonSpec, t: float, grid: Grid) -> FieldState:
        """u_{ω,c}(t, x) = e^{iωt} φ_{ω,c}(x - ct) sobre la malla"""
        SolitonService.check_boundary(spec, grid)
        values = np.exp(1j * spec.omega * t) * SolitonService.profile_field(spec, grid, t)
        return SpectralService.field(grid, values, t)

    @staticmethod
    def soliton_residual(spec: SolitonSpec, grid: Grid) -> float:
        """
        ‖i u_t + u_xx + i|u|^{2σ}u_x + b|u|^{4σ}u‖_{L²} en t = 0

        u_t sale del ansatz (iω - c∂_x)u; las derivadas espaciales son espectrales.
        """
        u = SolitonService.soliton_field(spec, 0.0, grid)
        values = u.values
        u_x = SpectralService.derivative_values(grid, values)
        u_xx = SpectralService.derivative_values(grid, values, 2)
        u_t = 1j * spec.omega * values - spec.c * u_x
        modulus = np.abs(values)
        residual = (
            1j * u_t + u_xx
            + 1j * modulus ** (2 * spec.sigma) * u_x
            + spec.b * modulus ** (4 * spec.sigma) * values
        )
        return float(np.sqrt(np.sum(np.abs(residual) ** 2) * grid.dx))
