"""
Integración temporal RK4 con factor integrante (Lawson)
Construcción de Picard con coeficientes congelados para soluciones regularizadas
"""

import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import CubicSpline

from app.core import ConvergenceError, GridError, IntegrationError, ParameterError
from app.models import FieldState, Grid, LedgerRow, ModelParams, PicardResult, StepConfig, Trajectory
from app.services.model_service import ModelService
from app.services.spectral_service import SpectralService

logger = logging.getLogger(__name__)

# N(values, t) in physical space, with u_t = i u_xx + N
Nonlinearity = Callable[[np.ndarray, float], np.ndarray]

DIVERGENCE_FLOOR = 1e-12


class IntegratorService:
    """Servicio para la integración temporal"""

    # =========================
    # STEPPER
    # =========================
    @staticmethod
    def _step_count(t_final: float, dt: float) -> int:
        return max(1, int(math.ceil(t_final / dt - 1e-9)))

    @staticmethod
    def _lawson_step(
        coefficients: np.ndarray,
        t: float,
        h: float,
        nonlinear: Nonlinearity,
        mask: Optional[np.ndarray],
        half: np.ndarray,
        full: np.ndarray,
    ) -> np.ndarray:
        """Un paso IF-RK4 sobre û; half = e^{-iξ²h/2}, full = e^{-iξ²h}"""

        def rate(c: np.ndarray, time: float) -> np.ndarray:
            value = sfft.fft(nonlinear(sfft.ifft(c), time))
            return value if mask is None else mask * value

        k1 = h * rate(coefficients, t)
        k2 = h * rate(half * (coefficients + k1 / 2), t + h / 2)
        k3 = h * rate(half * coefficients + k2 / 2, t + h / 2)
        k4 = h * rate(full * coefficients + half * k3, t + h)
        return full * coefficients + (full * k1 + 2 * half * (k2 + k3) + k4) / 6

    @staticmethod
    def integrate(
        u0: FieldState,
        p: ModelParams,
        t_final: float,
        cfg: StepConfig,
        nonlinear: Nonlinearity,
        record_every: Optional[int] = None,
    ) -> Trajectory:
        """
        Avanzar u0 hasta t_final con una no linealidad dada

        dt se reduce para que un número entero de pasos llegue exactamente a t_final.

        Raises:
            IntegrationError: Con muestras no finitas o si ‖u‖_∞ supera blowup_factor × su valor inicial
        """
        SpectralService.require_finite(u0)
        if t_final <= 0:
            raise ParameterError(f"t_final must be positive, got {t_final}")
        grid = u0.grid
        steps = IntegratorService._step_count(t_final, cfg.dt)
        h = t_final / steps
        every = record_every or cfg.record_every
        xi2 = grid.frequencies ** 2
        half = np.exp(-1j * xi2 * h / 2)
        full = np.exp(-1j * xi2 * h)
        mask = SpectralService.dealias_mask(grid) if cfg.dealias else None

        initial_peak = ModelService.linf_norm(u0)
        limit = cfg.blowup_factor * initial_peak
        if p.nonlinear and h > ModelService.cfl_limit(u0, p):
            logger.warning(f"dt={h:.3e} exceeds the advective CFL estimate {ModelService.cfl_limit(u0, p):.3e}")

        states: List[FieldState] = [u0]
        ledger: List[LedgerRow] = [ModelService.ledger_row(u0, p)]
        coefficients = sfft.fft(u0.values)
        progress = max(1, steps // 10)
        for m in range(steps):
            t = u0.time + m * h
            coefficients = IntegratorService._lawson_step(coefficients, t, h, nonlinear, mask, half, full)
            if (m + 1) % every != 0 and m + 1 != steps:
                continue
            values = sfft.ifft(coefficients)
            if not np.all(np.isfinite(values)):
                raise IntegrationError(f"non-finite samples at t={t + h:.6g}")
            peak = float(np.max(np.abs(values)))
            if peak > limit and initial_peak > 0:
                raise IntegrationError(
                    f"blow-up guard: |u|_inf={peak:.3e} exceeds {cfg.blowup_factor:g} x initial {initial_peak:.3e} "
                    f"at t={t + h:.6g}"
                )
            state = u0.with_values(values, time=u0.time + (m + 1) * h)
            states.append(state)
            ledger.append(ModelService.ledger_row(state, p))
            if (m + 1) % progress == 0:
                logger.debug(f"step {m + 1}/{steps} t={state.time:.4g} mass={ledger[-1].mass:.12g}")
        return Trajectory(states=states, ledger=ledger, params=p)

    # =========================
    # EVOLUTION
    # =========================
    @staticmethod
    def evolve(u0: FieldState, p: ModelParams, t_final: float, cfg: StepConfig) -> Trajectory:
        """RK4 de Lawson para u_t = i u_xx + N(u) con N de ModelService"""
        grid = u0.grid

        def nonlinear(values: np.ndarray, t: float) -> np.ndarray:
            return ModelService.nonlinearity_values(grid, values, p, t)

        return IntegratorService.integrate(u0, p, t_final, cfg, nonlinear)

    @staticmethod
    def evolve_regularized(u0: FieldState, p: ModelParams, t_final: float, cfg: StepConfig) -> Trajectory:
        """
        Flujo de (i∂_t + ∂_x²)u = i η P_{<k}|u|^{2σ} u_x desde P_{<k}u0

        Fuera del soporte del corte (|t| >= outer) es el flujo libre de Schrödinger.

        Raises:
            ParameterError: Si p no trae regularización
        """
        if p.regularization is None:
            raise ParameterError("evolve_regularized needs ModelParams.regularization")
        if t_final > p.regularization.eta.outer:
            logger.info(f"t_final={t_final} runs past the cutoff support; the tail is a free flow")
        start = SpectralService.apply_multiplier(
            u0, SpectralService.low_pass_multiplier(u0.grid, p.regularization.k)
        )
        return IntegratorService.evolve(start, p, t_final, cfg)

    # =========================
    # PICARD
    # =========================
    @staticmethod
    def _frozen(grid: Grid, previous: Trajectory, p: ModelParams) -> Nonlinearity:
        """Lado derecho lineal con coeficientes interpolados en tiempo desde el iterado anterior"""
        times = previous.times
        transport = []
        power = []
        for state in previous.states:
            a, q = ModelService.coefficients(grid, state.values, p, state.time)
            transport.append(a)
            power.append(q)
        transport_spline = CubicSpline(times, np.stack(transport), axis=0)
        power_spline = CubicSpline(times, np.stack(power), axis=0) if p.b != 0 else None
        sign = int(p.sign)

        def nonlinear(values: np.ndarray, t: float) -> np.ndarray:
            u_x = SpectralService.derivative_values(grid, values)
            result = -sign * transport_spline(t) * u_x
            if power_spline is not None:
                result = result + 1j * p.b * power_spline(t) * values
            return result

        return nonlinear

    @staticmethod
    def _zero_trajectory(start: FieldState, p: ModelParams, times: np.ndarray) -> Trajectory:
        zero = np.zeros(start.grid.n, dtype=complex)
        states = [start.with_values(zero, time=float(t)) for t in times]
        return Trajectory(states=states, ledger=[ModelService.ledger_row(s, p) for s in states], params=p)

    @staticmethod
    def picard_construct(
        u0: FieldState,
        p: ModelParams,
        n_iter: int,
        cfg: StepConfig,
        t_final: float = 1.0,
        scale: float = 1.0,
    ) -> PicardResult:
        """
        Iterados (i∂_t + ∂_x²)u^{(n+1)} = iη P_{<k}|u^{(n)}|^{2σ} ∂_x u^{(n+1)}, u^{(0)} = 0

        Cada iterado parte de P_{<k}(scale·u0) y se guarda en cada paso para que
        el siguiente interpole su coeficiente en los tiempos de etapa de RK4.

        Args:
            u0: Dato inicial
            p: Parámetros del modelo regularizado
            n_iter: Número de iterados después de u^{(0)}
            cfg: Configuración del paso (se ignora record_every)
            t_final: Horizonte T
            scale: Multiplica u0, el control de datos pequeños

        Returns:
            PicardResult con los n_iter + 1 iterados y d_n = ‖u^{(n+1)} - u^{(n)}‖_{L^∞_T L²}

        Raises:
            ParameterError: Si p no trae regularización o n_iter < 1
            ConvergenceError: Si d_n crece dos veces seguidas por encima del piso de redondeo
        """
        if p.regularization is None:
            raise ParameterError("picard_construct needs ModelParams.regularization")
        if n_iter < 1:
            raise ParameterError(f"n_iter must be at least 1, got {n_iter}")
        grid = u0.grid
        scaled = u0.with_values(scale * u0.values)
        start = SpectralService.apply_multiplier(
            scaled, SpectralService.low_pass_multiplier(grid, p.regularization.k)
        )
        steps = IntegratorService._step_count(t_final, cfg.dt)
        times = start.time + np.arange(steps + 1) * (t_final / steps)

        iterates = [IntegratorService._zero_trajectory(start, p, times)]
        differences: List[float] = []
        for n in range(n_iter):
            previous = iterates[-1]
            nonlinear = IntegratorService._frozen(grid, previous, p)
            current = IntegratorService.integrate(start, p, t_final, cfg, nonlinear, record_every=1)
            d = IntegratorService.trajectory_distance(current, previous)
            differences.append(d)
            iterates.append(current)
            logger.info(f"picard iterate {n + 1}/{n_iter}: d_{n} = {d:.6e}")
            if len(differences) >= 3:
                d0 = differences[0]
                a, b, c = differences[-3:]
                if c > b > a and c > DIVERGENCE_FLOOR * d0:
                    raise ConvergenceError(f"picard differences increased twice in a row: {a:.3e}, {b:.3e}, {c:.3e}")
        return PicardResult(iterates=iterates, differences=differences)

    # =========================
    # HELPERS
    # =========================
    @staticmethod
    def trajectory_distance(first: Trajectory, second: Trajectory) -> float:
        """max_t ‖u_1(t) - u_2(t)‖_{L²} sobre instantes compartidos"""
        if not first.grid.matches(second.grid):
            raise GridError("trajectories live on different grids")
        if len(first.states) != len(second.states) or not np.allclose(first.times, second.times, rtol=0, atol=1e-12):
            raise ParameterError("trajectories are not sampled at the same times")
        difference = first.stack() - second.stack()
        return float(np.max(np.sqrt(np.sum(np.abs(difference) ** 2, axis=1) * first.grid.dx)))

    @staticmethod
    def l2_distance(u: FieldState, v: FieldState) -> float:
        SpectralService.require_same_grid(u, v)
        return float(np.sqrt(np.sum(np.abs(u.values - v.values) ** 2) * u.grid.dx))

    @staticmethod
    def measure_order(errors: Sequence[float], dts: Sequence[float]) -> List[float]:
        """Órdenes observados log(e_i/e_{i+1}) / log(dt_i/dt_{i+1}) entre refinamientos sucesivos"""
        if len(errors) != len(dts) or len(errors) < 2:
            raise ParameterError("measure_order needs at least two (error, dt) pairs of equal length")
        orders = []
        for (e0, e1), (h0, h1) in zip(zip(errors[:-1], errors[1:]), zip(dts[:-1], dts[1:])):
            if e0 <= 0 or e1 <= 0:
                orders.append(math.inf if e1 <= 0 < e0 else 0.0)
                continue
            orders.append(math.log(e0 / e1) / math.log(h0 / h1))
        return orders
