"""
Diagnósticos de normas, envolventes, modulación y estimaciones
"""

import logging
import math
from typing import Iterable, List, Optional, Union

import numpy as np
from scipy import fft as sfft
from scipy.integrate import cumulative_trapezoid

from app.core import GridError, ParameterError
from app.models import (
    BernsteinReport,
    BlockSelector,
    CommutatorReport,
    ContinuityReport,
    DerivativeKind,
    EnergyBoundReport,
    EnergyEstimateReport,
    EnvelopeTrack,
    FieldState,
    FrequencyEnvelope,
    LPLadder,
    MixedNormSpec,
    ModelParams,
    ModulationReport,
    NormOrder,
    SmoothingReport,
    TimeCutoff,
    Trajectory,
)
from app.services.model_service import ModelService
from app.services.spectral_service import RAMP_WIDTH, SpectralService

logger = logging.getLogger(__name__)

EnvelopeNorm = Union[str, MixedNormSpec]

# sup |ϕ_j'| <= 2^{-j}·π/RAMP_WIDTH, the ramps of ϕ_0(2^{-j}·) and ϕ_0(2^{1-j}·) being disjoint
COMMUTATOR_BOUND = math.pi / RAMP_WIDTH
COMPACT_TOLERANCE = 1e-8


def envelope_square_bound(delta: float) -> float:
    """C_env(δ) = 2(1/(1 - 2^{-2δ}) + 1 + 2/(2^{2δ} - 1))"""
    return 2.0 * (1.0 / (1.0 - 2.0 ** (-2 * delta)) + 1.0 + 2.0 / (2.0 ** (2 * delta) - 1.0))


def smoothing_bound(j: int, span: float, length: float) -> float:
    """Cota de ||P_j D^{1/2} e^{it∂²}u||_{L^∞_x L²_T} / ||u||_{L²} en el toro de longitud L"""
    return math.sqrt(2.0 * (1.0 + RAMP_WIDTH) * (span * 2.0 ** j / length + 1.5))


class AnalysisService:
    """Servicio para normas y diagnósticos"""

    # =========================
    # NORMS
    # =========================
    @staticmethod
    def sobolev_norm(u: FieldState, s: float, kind: str = "inhomogeneous") -> float:
        """‖u‖_{H^s} o ‖u‖_{Ḣ^s} por Plancherel: (L/n²) Σ w(ξ)²|û|²"""
        SpectralService.require_finite(u)
        weights = SpectralService.fractional_multiplier(u.grid, s, kind)
        coefficients = sfft.fft(u.values)
        return float(np.sqrt(u.grid.length / u.grid.n ** 2 * np.sum(weights ** 2 * np.abs(coefficients) ** 2)))

    @staticmethod
    def _prepared(traj: Trajectory, spec: MixedNormSpec, ladder: Optional[LPLadder]) -> np.ndarray:
        grid = traj.grid
        multiplier = np.ones(grid.n)
        if spec.derivative != DerivativeKind.NONE:
            multiplier = multiplier * SpectralService.fractional_multiplier(grid, spec.s, spec.derivative.value)
        if spec.block is not None:
            ladder = ladder or SpectralService.make_ladder(grid)
            SpectralService._check_index(ladder, spec.block, "block")
            multiplier = multiplier * ladder.block(spec.block)
        stack = traj.stack()
        if spec.derivative == DerivativeKind.NONE and spec.block is None:
            return stack
        return sfft.ifft(multiplier * sfft.fft(stack, axis=1), axis=1)

    @staticmethod
    def _reduce(values: np.ndarray, exponent: float, weight: float, axis: int, last: bool = True) -> np.ndarray:
        """L^exponent sobre axis; en tiempo se descarta la última muestra (regla del rectángulo)"""
        magnitude = np.abs(values)
        if math.isinf(exponent):
            return np.max(magnitude, axis=axis)
        if not last:
            magnitude = np.take(magnitude, range(magnitude.shape[axis] - 1), axis=axis)
        return (np.sum(magnitude ** exponent, axis=axis) * weight) ** (1.0 / exponent)

    @staticmethod
    def _spacing(times: np.ndarray, caller: str) -> float:
        spacing = np.diff(times)
        dt = float(spacing[0])
        if not np.allclose(spacing, dt, rtol=1e-9, atol=0):
            raise ParameterError(f"{caller} needs uniformly spaced snapshots")
        return dt

    @staticmethod
    def mixed_norm(traj: Trajectory, spec: MixedNormSpec, ladder: Optional[LPLadder] = None) -> float:
        """
        Norma discreta L^p_T L^q_x o L^p_x L^q_T sobre la red de instantáneas

        Las integrales en tiempo usan la regla del rectángulo en [t_0, t_last); L^∞ en
        tiempo es el máximo sobre instantáneas. La derivada y el bloque de spec se
        aplican a cada instantánea.

        Raises:
            ParameterError: Si se pide una integral temporal con una sola instantánea o
                el muestreo no es uniforme
        """
        times = traj.times
        time_exponent = spec.p_outer if spec.order == NormOrder.TIME_OUTER else spec.q_inner
        if len(times) < 2:
            if not math.isinf(time_exponent):
                raise ParameterError("a time integral needs at least two snapshots")
            dt = 1.0
        else:
            dt = AnalysisService._spacing(times, "mixed_norm")
        if spec.order == NormOrder.SPACE_OUTER and math.isinf(spec.q_inner):
            logger.warning(f"{spec.label()}: L^inf in time is sampled on snapshots only")

        values = AnalysisService._prepared(traj, spec, ladder)
        dx = traj.grid.dx
        if spec.order == NormOrder.TIME_OUTER:
            inner = AnalysisService._reduce(values, spec.q_inner, dx, axis=1)
            return float(AnalysisService._reduce(inner, spec.p_outer, dt, axis=0, last=False))
        inner = AnalysisService._reduce(values, spec.q_inner, dt, axis=0, last=False)
        return float(AnalysisService._reduce(inner, spec.p_outer, dx, axis=0))

    @staticmethod
    def norm_of(target: Union[FieldState, Trajectory], norm: EnvelopeNorm) -> float:
        """‖·‖_X para los selectores `l2`, `h1`, `hs:<s>` o un MixedNormSpec"""
        if isinstance(norm, MixedNormSpec):
            if not isinstance(target, Trajectory):
                raise ParameterError("a mixed norm needs a trajectory")
            return AnalysisService.mixed_norm(target, norm)
        if isinstance(target, Trajectory):
            raise ParameterError(f"norm '{norm}' applies to a single snapshot")
        if norm == "l2":
            return AnalysisService.sobolev_norm(target, 0.0)
        if norm == "h1":
            return AnalysisService.sobolev_norm(target, 1.0)
        if norm.startswith("hs:"):
            try:
                s = float(norm[3:])
            except ValueError:
                raise ParameterError(f"cannot parse Sobolev index in '{norm}'")
            return AnalysisService.sobolev_norm(target, s)
        raise ParameterError(f"unknown norm selector '{norm}'")

    # =========================
    # ENVELOPES
    # =========================
    @staticmethod
    def _project_target(target: Union[FieldState, Trajectory], multiplier: np.ndarray):
        if isinstance(target, FieldState):
            return SpectralService.apply_multiplier(target, multiplier)
        states = [SpectralService.apply_multiplier(state, multiplier) for state in target.states]
        return Trajectory(states=states, ledger=target.ledger, params=target.params)

    @staticmethod
    def frequency_envelope(
        target: Union[FieldState, Trajectory],
        norm: EnvelopeNorm = "l2",
        delta: float = 0.1,
        ladder: Optional[LPLadder] = None,
    ) -> FrequencyEnvelope:
        """
        a_j = 2^{-δj} + ‖u‖_X^{-1} max_k 2^{-δ|j-k|} ‖P_k u‖_X para j = 0..j_max

        El bloque 0 es P_{≤0}.

        Raises:
            ParameterError: Si δ <= 0 o ‖u‖_X = 0
        """
        if delta <= 0:
            raise ParameterError(f"delta must be positive, got {delta}")
        grid = target.grid
        ladder = ladder or SpectralService.make_ladder(grid)
        if not grid.matches(ladder.grid):
            raise GridError("target and ladder live on different grids")
        total = AnalysisService.norm_of(target, norm)
        if total == 0:
            raise ParameterError("frequency envelope is undefined for a zero field")
        blocks = np.array([
            AnalysisService.norm_of(AnalysisService._project_target(target, row), norm) for row in ladder.phi
        ])
        index = np.arange(ladder.j_max + 1)
        decay = 2.0 ** (-delta * np.abs(index[:, None] - index[None, :]))
        values = 2.0 ** (-delta * index) + np.max(decay * blocks[None, :], axis=1) / total
        label = norm.label() if isinstance(norm, MixedNormSpec) else norm
        return FrequencyEnvelope(
            delta=delta,
            values=values.tolist(),
            block_norms=blocks.tolist(),
            total_norm=total,
            norm_used=label,
            square_sum=float(np.sum(values ** 2)),
            square_sum_bound=envelope_square_bound(delta),
        )

    @staticmethod
    def envelope_propagation(
        traj: Trajectory,
        norm: str = "l2",
        delta: float = 0.1,
        ladder: Optional[LPLadder] = None,
    ) -> EnvelopeTrack:
        """
        Seguimiento de la envolvente del dato a lo largo del flujo

        En cada instantánea se mide max_j ‖P_j u(t)‖_X / (a_j ‖u(t_0)‖_X), con a_j la
        envolvente de u(t_0). Solo admite selectores de una instantánea.
        """
        if isinstance(norm, MixedNormSpec):
            raise ParameterError("envelope propagation tracks a single-snapshot norm")
        ladder = ladder or SpectralService.make_ladder(traj.grid)
        envelope = AnalysisService.frequency_envelope(traj.states[0], norm, delta, ladder)
        scale = np.array(envelope.values) * envelope.total_norm
        ratios = []
        worst, worst_block = 0.0, 0
        for state in traj.states:
            pieces = SpectralService.lp_blocks(state, ladder)
            blocks = np.array([AnalysisService.norm_of(piece, norm) for piece in pieces])
            per_block = blocks / scale
            ratios.append(float(np.max(per_block)))
            if ratios[-1] > worst:
                worst, worst_block = ratios[-1], int(np.argmax(per_block))
        return EnvelopeTrack(
            delta=delta,
            norm_used=envelope.norm_used,
            times=traj.times.tolist(),
            ratios=ratios,
            worst=worst,
            worst_block=worst_block,
        )

    # =========================
    # MODULATION
    # =========================
    @staticmethod
    def time_cutoff(traj: Trajectory, cutoff: Optional[TimeCutoff] = None) -> Trajectory:
        """Multiplica cada instantánea por η(4(t - t_c)/T); el resultado se anula en los extremos"""
        cutoff = cutoff or TimeCutoff()
        times = traj.times
        center = 0.5 * (times[0] + times[-1])
        span = times[-1] - times[0]
        if span <= 0:
            raise ParameterError("time_cutoff needs at least two snapshots")
        weights = cutoff.evaluate(2 * cutoff.outer * (times - center) / span)
        states = [state.with_values(weight * state.values) for state, weight in zip(traj.states, weights)]
        return Trajectory(states=states, ledger=traj.ledger, params=traj.params, notes=traj.notes)

    @staticmethod
    def modulation_split(
        traj: Trajectory,
        j: int,
        width: int = 4,
        ladder: Optional[LPLadder] = None,
        hann: bool = False,
        pad: int = 4,
    ) -> ModulationReport:
        """
        Energía de P_j u cerca de τ = -ξ² frente a la energía lejos de ella

        La trayectoria debe anularse en sus extremos (ver time_cutoff); con hann se le
        aplica antes una ventana de Hann. Se rellena con ceros hasta pad veces su
        longitud y se transforma en (t, x). La parte de baja modulación es la fracción
        que cae en la ventana temporal S_{[2j-width, 2j+width]}.

        Raises:
            ParameterError: Si j está fuera de la escalera, el muestreo no es uniforme
                o la trayectoria no es compacta en tiempo
        """
        ladder = ladder or SpectralService.make_ladder(traj.grid)
        SpectralService._check_index(ladder, j)
        times = traj.times
        if len(times) < 4:
            raise ParameterError("modulation_split needs at least four snapshots")
        dt = AnalysisService._spacing(times, "modulation_split")

        stack = traj.stack()
        peak = float(np.max(np.abs(stack)))
        if peak == 0:
            return ModulationReport(j=j, width=width, low=0.0, high=0.0, empty=True)
        if hann:
            stack = stack * np.hanning(len(times))[:, None]
        edge = max(np.max(np.abs(stack[0])), np.max(np.abs(stack[-1])))
        if edge > COMPACT_TOLERANCE * peak:
            raise ParameterError(
                f"trajectory is not compact in time (edge/peak = {edge / peak:.3e}); apply a time cutoff first"
            )

        padded = np.zeros((pad * len(times), traj.grid.n), dtype=complex)
        padded[: len(times)] = stack
        spectrum = sfft.fft2(padded) * ladder.block(j)[None, :]
        energy = np.abs(spectrum) ** 2
        total = float(np.sum(energy))
        if total == 0:
            return ModulationReport(j=j, width=width, low=0.0, high=0.0, empty=True)

        tau = np.abs(2 * np.pi * sfft.fftfreq(padded.shape[0], d=dt))
        a, b = 2 * j - width, 2 * j + width
        window = SpectralService.phi0(tau / 2.0 ** b)
        if a >= 1:
            window = window - SpectralService.phi0(tau / 2.0 ** (a - 1))
        low = float(np.sum(window[:, None] * energy)) / total
        return ModulationReport(j=j, width=width, low=low, high=1.0 - low)

    @staticmethod
    def local_smoothing(traj: Trajectory, j: int, ladder: Optional[LPLadder] = None) -> SmoothingReport:
        """
        ‖P_j D^{1/2} u‖_{L^∞_x L²_T} / ‖u(t_0)‖_{L²} y su cota para el flujo libre

        resolved indica que el espaciado de instantáneas separa todas las frecuencias
        temporales ξ² del bloque; sin eso la cota no aplica a la suma discreta.
        """
        ladder = ladder or SpectralService.make_ladder(traj.grid)
        SpectralService._check_index(ladder, j)
        times = traj.times
        if len(times) < 2:
            raise ParameterError("local_smoothing needs at least two snapshots")
        dt = AnalysisService._spacing(times, "local_smoothing")
        spec = MixedNormSpec(
            order=NormOrder.SPACE_OUTER,
            p_outer=math.inf,
            q_inner=2.0,
            derivative=DerivativeKind.HOMOGENEOUS,
            s=0.5,
            block=j,
        )
        value = AnalysisService.mixed_norm(traj, spec, ladder)
        initial = AnalysisService.sobolev_norm(traj.states[0], 0.0)
        top = ((1.0 + RAMP_WIDTH) * 2.0 ** j) ** 2
        span = times[-1] - times[0]
        return SmoothingReport(
            j=j,
            value=value,
            initial=initial,
            ratio=value / initial if initial > 0 else 0.0,
            bound=smoothing_bound(j, span, traj.grid.length),
            resolved=bool(top * dt <= math.pi),
        )

    # =========================
    # AUDITS
    # =========================
    @staticmethod
    def partition_defect(u: FieldState, ladder: LPLadder) -> float:
        """max|Σ_j P_j u + P_tail u - u| / max|u|"""
        pieces = SpectralService.lp_blocks(u, ladder)
        tail = SpectralService.selector_multiplier(ladder, BlockSelector.tail())
        rebuilt = sum(piece.values for piece in pieces) + SpectralService.apply_multiplier(u, tail).values
        peak = float(np.max(np.abs(u.values)))
        return float(np.max(np.abs(rebuilt - u.values))) / peak if peak > 0 else 0.0

    @staticmethod
    def block_overlap(ladder: LPLadder) -> float:
        """max |ϕ_j ϕ_k| sobre |j - k| >= 2; nulo si los soportes son disjuntos"""
        worst = 0.0
        for j in range(ladder.j_max + 1):
            for k in range(j + 2, ladder.j_max + 1):
                worst = max(worst, float(np.max(np.abs(ladder.phi[j] * ladder.phi[k]))))
        return worst

    @staticmethod
    def bernstein_audit(
        ladder: LPLadder,
        s: float,
        samples: int,
        seed: int = 0,
        snapshots: int = 1,
    ) -> BernsteinReport:
        """
        Cocientes ‖D^s P_j u‖ / (2^{js}‖P_j u‖) para u aleatorio, bloques j = 1..j_max

        Con snapshots > 1 cada muestra es una pila de campos y las normas son L²_T L²_x.
        """
        if samples < 1 or snapshots < 1:
            raise ParameterError("bernstein_audit needs at least one sample and one snapshot")
        grid = ladder.grid
        rng = np.random.default_rng(seed)
        weights = SpectralService.fractional_multiplier(grid, s, "homogeneous")
        per_block = []
        for j in range(1, ladder.j_max + 1):
            block = ladder.block(j)
            ratios = []
            for _ in range(samples):
                coefficients = rng.standard_normal((snapshots, grid.n)) + 1j * rng.standard_normal((snapshots, grid.n))
                projected = block * coefficients
                base = math.sqrt(float(np.sum(np.abs(projected) ** 2)))
                if base == 0:
                    continue
                derived = math.sqrt(float(np.sum(np.abs(weights * projected) ** 2)))
                ratios.append(derived / (2.0 ** (j * s) * base))
            per_block.append((j, min(ratios), max(ratios)))
        return BernsteinReport(
            s=s,
            samples=samples,
            min_ratio=min(item[1] for item in per_block),
            max_ratio=max(item[2] for item in per_block),
            lower=0.5 ** abs(s) * (6.0 / 7.0) ** max(s, 0.0),
            upper=2.0 ** abs(s) * (7.0 / 6.0) ** max(s, 0.0),
            per_block=per_block,
        )

    @staticmethod
    def commutator_audit(ladder: LPLadder, samples: int, seed: int = 0, modes: int = 4) -> CommutatorReport:
        """
        Constante de ‖[P_j, f]g‖_{L²} <= C 2^{-j} ‖f_x‖_{L^∞} ‖g‖_{L²} sobre datos aleatorios

        f = cos(κx + θ) con κ uno de los primeros `modes` números de onda, g aleatorio
        limitado a |ξ| <= ξ_max/2 para que el producto no sufra aliasing.
        """
        if samples < 1 or modes < 1:
            raise ParameterError("commutator_audit needs at least one sample and one mode")
        grid = ladder.grid
        fundamental = 2 * math.pi / grid.length
        if modes * fundamental > grid.max_frequency / 2:
            raise GridError(f"grid n={grid.n} is too coarse for {modes} commutator modes")
        rng = np.random.default_rng(seed)
        xi = grid.frequencies
        band = (np.abs(xi) <= grid.max_frequency / 2) / np.sqrt(1.0 + xi ** 2)
        worst = np.zeros(ladder.j_max)
        for _ in range(samples):
            kappa = fundamental * int(rng.integers(1, modes + 1))
            f = SpectralService.field(grid, np.cos(kappa * grid.points + rng.uniform(0, 2 * np.pi)))
            coefficients = band * (rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
            g = SpectralService.field(grid, sfft.ifft(coefficients))
            g_norm = AnalysisService.sobolev_norm(g, 0.0)
            if g_norm == 0:
                continue
            for j in range(1, ladder.j_max + 1):
                commutator = SpectralService.commutator_apply(f, g, ladder, j)
                constant = AnalysisService.sobolev_norm(commutator, 0.0) / (2.0 ** -j * kappa * g_norm)
                worst[j - 1] = max(worst[j - 1], constant)
        return CommutatorReport(
            samples=samples,
            worst=float(np.max(worst)),
            bound=COMMUTATOR_BOUND,
            per_block=[(j, float(worst[j - 1])) for j in range(1, ladder.j_max + 1)],
        )

    @staticmethod
    def _energy_gap_ratios(fields: Iterable[FieldState], p: ModelParams, exponent: float) -> List[float]:
        ratios = []
        for u in fields:
            mass = ModelService.mass(u)
            if mass == 0:
                continue
            gradient = AnalysisService.sobolev_norm(u, 1.0, "homogeneous") ** 2
            gap = 0.25 * gradient - ModelService.energy(u, p)
            ratios.append(gap / mass ** exponent)
        return ratios

    @staticmethod
    def energy_bound_calibration(
        calibration: List[FieldState],
        validation: List[FieldState],
        p: ModelParams,
        margin: float = 2.0,
    ) -> EnergyBoundReport:
        """
        Calibrar C en E(u) ≥ ¼‖u_x‖² - C·M(u)^{(1+σ)/(2(1-σ))} y verificar otro ensamble

        Raises:
            ParameterError: Si σ >= 1 o un ensamble no tiene campos no nulos
        """
        if p.sigma >= 1:
            raise ParameterError(f"the energy lower bound needs sigma < 1, got {p.sigma}")
        exponent = (1 + p.sigma) / (2 * (1 - p.sigma))
        calibrated = AnalysisService._energy_gap_ratios(calibration, p, exponent)
        checked = AnalysisService._energy_gap_ratios(validation, p, exponent)
        if not calibrated or not checked:
            raise ParameterError("energy bound ensembles need nonzero fields")
        constant = max(max(calibrated), 0.0)
        worst = max(checked)
        return EnergyBoundReport(
            sigma=p.sigma,
            exponent=exponent,
            calibrated_constant=constant,
            margin=margin,
            worst_validation_ratio=worst,
            passed=bool(worst <= margin * constant),
        )

    # =========================
    # ESTIMATES ALONG THE FLOW
    # =========================
    @staticmethod
    def hs_distance(first: Trajectory, second: Trajectory, s: float) -> float:
        """max_t ‖u_1(t) - u_2(t)‖_{H^s} sobre instantes compartidos"""
        if not first.grid.matches(second.grid):
            raise GridError("trajectories live on different grids")
        if len(first.states) != len(second.states) or not np.allclose(first.times, second.times, rtol=0, atol=1e-12):
            raise ParameterError("trajectories are not sampled at the same times")
        return max(
            AnalysisService.sobolev_norm(a.with_values(a.values - b.values), s)
            for a, b in zip(first.states, second.states)
        )

    @staticmethod
    def continuity(base: Trajectory, perturbed: Trajectory, s: float) -> ContinuityReport:
        first, second = base.states[0], perturbed.states[0]
        initial = AnalysisService.sobolev_norm(first.with_values(first.values - second.values), s)
        if initial == 0:
            raise ParameterError("continuity needs distinct initial data")
        distance = AnalysisService.hs_distance(base, perturbed, s)
        return ContinuityReport(s=s, initial=initial, distance=distance, ratio=distance / initial)

    @staticmethod
    def energy_estimate(traj: Trajectory, p: ModelParams, s: float = 0.0) -> EnergyEstimateReport:
        """
        ‖u(t)‖_{H^s} <= ‖u(t_0)‖_{H^s} + ∫ ‖N(u)‖_{H^s} a lo largo de la trayectoria

        N es la parte no lineal de u_t = i u_xx + N(u); la integral usa la regla del
        trapecio sobre las instantáneas.
        """
        times = traj.times
        lhs = np.array([AnalysisService.sobolev_norm(state, s) for state in traj.states])
        forcing = np.array([
            AnalysisService.sobolev_norm(ModelService.nonlinearity(state, p, state.time), s) for state in traj.states
        ])
        if len(times) > 1:
            accumulated = cumulative_trapezoid(forcing, times, initial=0.0)
        else:
            accumulated = np.zeros(1)
        rhs = lhs[0] + accumulated
        ratios = np.divide(lhs, rhs, out=np.zeros_like(lhs), where=rhs > 0)
        return EnergyEstimateReport(
            s=s,
            rows=[(float(t), float(a), float(b)) for t, a, b in zip(times, lhs, rhs)],
            worst_ratio=float(np.max(ratios)),
        )
