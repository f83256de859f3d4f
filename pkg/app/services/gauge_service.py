"""
Transformaciones de gauge w = e^{iΦ}u en la malla periódica
"""

import logging
from typing import List, Tuple

import numpy as np
from scipy import fft as sfft

from app.core import FieldError, GridError, ParameterError
from app.models import AmplitudeCutoffs, FieldState, GaugePhase, LPLadder, NonlinearitySign, Trajectory
from app.services.spectral_service import SpectralService

logger = logging.getLogger(__name__)

PARTIAL_GAUGE_MIN_BLOCK = 5


class GaugeService:
    """Servicio para transformaciones de gauge"""

    # =========================
    # ANTIDERIVATIVE
    # =========================
    @staticmethod
    def antiderivative(f: FieldState) -> GaugePhase:
        """
        ∫_{-L/2}^x f, separada en una rampa lineal (la media de f) y una parte periódica

        La parte periódica es la antiderivada espectral de media cero de f - mean(f);
        el desplazamiento fija Φ(-L/2) = 0.

        Raises:
            FieldError: Si f tiene parte imaginaria no despreciable
        """
        SpectralService.require_finite(f)
        values = f.values
        scale = float(np.max(np.abs(values))) if values.size else 0.0
        if np.max(np.abs(values.imag)) > 1e-12 * max(scale, 1.0):
            raise FieldError("antiderivative expects a real integrand")
        g = values.real
        grid = f.grid
        slope = float(np.mean(g))
        xi = grid.frequencies
        coefficients = sfft.fft(g)
        inverse = np.zeros_like(coefficients)
        keep = xi != 0
        keep[grid.n // 2] = False  # Nyquist mode has no real antiderivative
        inverse[keep] = coefficients[keep] / (1j * xi[keep])
        periodic = np.real(sfft.ifft(inverse))
        return GaugePhase(grid=grid, ramp_slope=slope, periodic_part=periodic, offset=-float(periodic[0]))

    # =========================
    # GAUGES
    # =========================
    @staticmethod
    def full_gauge(u: FieldState, sigma: float) -> Tuple[FieldState, GaugePhase]:
        """Φ = -½∫_{-L/2}^x |u|^{2σ}, w = e^{iΦ}u"""
        if sigma <= 0:
            raise ParameterError(f"sigma must be positive, got {sigma}")
        density = u.with_values(np.abs(u.values) ** (2 * sigma))
        phase = GaugeService.antiderivative(density).scaled(-0.5)
        return u.with_values(np.exp(1j * phase.values()) * u.values), phase

    @staticmethod
    def cutoffs(j: int) -> AmplitudeCutoffs:
        return AmplitudeCutoffs(j=j)

    @staticmethod
    def gated_density(u: FieldState, sigma: float, j: int) -> np.ndarray:
        """χ_j(|u|²)|u|^{2σ}"""
        modulus = np.abs(u.values)
        return AmplitudeCutoffs(j=j).chi(modulus ** 2) * modulus ** (2 * sigma)

    @staticmethod
    def partial_gauge(u: FieldState, sigma: float, j: int, ladder: LPLadder) -> Tuple[FieldState, GaugePhase]:
        """
        Gauge localizado en frecuencia w_j = e^{iΦ_j} P_j u

        Φ_j = -½ ∂_x^{-1} P_{<j-4}[χ_j(|u|²)|u|^{2σ}]: la proyección actúa sobre el
        integrando, cuya media (y por tanto la rampa) no cambia.

        Raises:
            ParameterError: Si j está fuera de [5, j_max]
        """
        if j < PARTIAL_GAUGE_MIN_BLOCK or j > ladder.j_max:
            raise ParameterError(f"partial gauge needs {PARTIAL_GAUGE_MIN_BLOCK} <= j <= {ladder.j_max}, got {j}")
        if sigma <= 0:
            raise ParameterError(f"sigma must be positive, got {sigma}")
        if not u.grid.matches(ladder.grid):
            raise GridError("field and ladder live on different grids")
        block = SpectralService.apply_multiplier(u, ladder.block(j))
        gated = GaugeService.gated_density(u, sigma, j)
        low = SpectralService.low_pass_multiplier(u.grid, j - 4)
        projected = np.real(sfft.ifft(low * sfft.fft(gated)))
        phase = GaugeService.antiderivative(u.with_values(projected)).scaled(-0.5)
        return block.with_values(np.exp(1j * phase.values()) * block.values), phase

    # =========================
    # RESIDUAL
    # =========================
    @staticmethod
    def _time_derivative(samples: np.ndarray, m: int, h: float) -> np.ndarray:
        """Diferencia central de cuarto orden en el índice interior m"""
        return (-samples[m + 2] + 8 * samples[m + 1] - 8 * samples[m - 1] + samples[m - 2]) / (12 * h)

    @staticmethod
    def gauge_residual(traj: Trajectory, sigma: float, stride: int = 1) -> List[Tuple[float, float]]:
        """
        ‖i w_t + w_xx - (-Φ_t + iΦ_xx - (Φ_x)²)w‖_{L²} en instantáneas interiores

        w_xx se desarrolla por la regla del producto alrededor de u, así la rampa no
        periódica de Φ nunca entra en una derivada espectral; las derivadas temporales
        usan diferencias centrales de cuarto orden cada `stride` instantáneas.

        Returns:
            Pares (t, residuo)

        Raises:
            ParameterError: Si la trayectoria no es un flujo gDNLS con b=0, tiene menos
                de cinco instantáneas útiles o no está muestreada uniformemente
        """
        p = traj.params
        if p.sign != NonlinearitySign.GDNLS or p.b != 0 or p.regularization is not None:
            raise ParameterError("gauge_residual applies to the unregularized gDNLS flow with b=0")
        states = traj.states[::stride]
        if len(states) < 5:
            raise ParameterError(f"gauge_residual needs at least 5 snapshots, got {len(states)}")
        times = np.array([state.time for state in states])
        spacing = np.diff(times)
        h = float(spacing[0])
        if not np.allclose(spacing, h, rtol=1e-9, atol=0):
            raise ParameterError("gauge_residual needs uniformly spaced snapshots")

        grid = traj.grid
        gauged = [GaugeService.full_gauge(state, sigma) for state in states]
        w = np.stack([pair[0].values for pair in gauged])
        phi = np.stack([pair[1].values() for pair in gauged])
        mismatch = max(abs(pair[1].boundary_mismatch()) for pair in gauged)
        logger.info(f"gauge boundary phase mismatch up to {mismatch:.3e}")

        series = []
        for m in range(2, len(states) - 2):
            u = states[m].values
            phase = gauged[m][1]
            phi_x = phase.derivative()
            phi_xx = phase.second_derivative()
            u_x = SpectralService.derivative_values(grid, u)
            u_xx = SpectralService.derivative_values(grid, u, 2)
            rotation = np.exp(1j * phi[m])
            w_xx = rotation * (u_xx + 2j * phi_x * u_x + 1j * phi_xx * u - phi_x ** 2 * u)
            w_t = GaugeService._time_derivative(w, m, h)
            phi_t = GaugeService._time_derivative(phi, m, h)
            residual = 1j * w_t + w_xx - (-phi_t + 1j * phi_xx - phi_x ** 2) * w[m]
            series.append((float(times[m]), float(np.sqrt(np.sum(np.abs(residual) ** 2) * grid.dx))))
        return series
