"""
Servicio espectral periódico
Mallas, transformadas, multiplicadores de Fourier y proyecciones de Littlewood-Paley
"""

import logging
import math

import numpy as np
from pydantic import ValidationError
from scipy import fft as sfft

from app.core import FieldError, GridError, ParameterError, describe_validation_error
from app.models import BlockKind, BlockSelector, FieldState, Grid, LPLadder

logger = logging.getLogger(__name__)

RAMP_WIDTH = 1.0 / 6.0


def smooth_cutoff(r: np.ndarray, inner: float = 1.0, width: float = RAMP_WIDTH) -> np.ndarray:
    """
    Escalón suave con coseno: 1 para |r| <= inner, 0 para |r| >= inner + width

    Args:
        r: Puntos donde se muestrea el perfil
        inner: Radio de la parte plana
        width: Longitud de la rampa

    Returns:
        Muestras en [0, 1], monótonas en |r|
    """
    a = np.abs(np.asarray(r, dtype=float))
    ramp = 0.5 * (1.0 + np.cos(np.pi * (a - inner) / width))
    return np.where(a <= inner, 1.0, np.where(a >= inner + width, 0.0, ramp))


class SpectralService:
    """Servicio para operaciones espectrales sobre la malla periódica"""

    # =========================
    # GRID & TRANSFORMS
    # =========================
    @staticmethod
    def make_grid(n: int, length: float) -> Grid:
        """Construir la malla; rechaza n que no sea potencia de dos y longitudes no positivas"""
        try:
            return Grid(n=n, length=length)
        except ValidationError as exc:
            raise GridError(describe_validation_error(exc, "grid"))

    @staticmethod
    def field(grid: Grid, values: np.ndarray, time: float = 0.0) -> FieldState:
        try:
            return FieldState(grid=grid, values=values, time=time)
        except ValidationError as exc:
            raise FieldError(describe_validation_error(exc, "field"))

    @staticmethod
    def forward(u: FieldState) -> np.ndarray:
        return sfft.fft(u.values)

    @staticmethod
    def inverse(coefficients: np.ndarray) -> np.ndarray:
        return sfft.ifft(coefficients)

    @staticmethod
    def apply_multiplier(u: FieldState, multiplier: np.ndarray) -> FieldState:
        """Aplicar un multiplicador de Fourier muestreado en u.grid.frequencies; el tiempo no cambia"""
        SpectralService.require_finite(u)
        return u.with_values(sfft.ifft(multiplier * sfft.fft(u.values)))

    @staticmethod
    def require_finite(u: FieldState) -> None:
        if not np.all(np.isfinite(u.values)):
            raise FieldError("field contains NaN or Inf samples")

    @staticmethod
    def require_same_grid(*fields: FieldState) -> None:
        first = fields[0].grid
        for other in fields[1:]:
            if not first.matches(other.grid):
                raise GridError(
                    f"grid mismatch: (n={first.n}, L={first.length}) vs (n={other.grid.n}, L={other.grid.length})"
                )

    # =========================
    # MULTIPLIERS
    # =========================
    @staticmethod
    def fractional_multiplier(grid: Grid, s: float, kind: str = "homogeneous") -> np.ndarray:
        xi = np.abs(grid.frequencies)
        if kind == "inhomogeneous":
            return (1.0 + xi ** 2) ** (s / 2)
        if kind != "homogeneous":
            raise ParameterError(f"unknown derivative kind '{kind}'")
        multiplier = np.zeros_like(xi)
        nonzero = xi > 0
        multiplier[nonzero] = xi[nonzero] ** s
        if s == 0:
            multiplier[~nonzero] = 1.0
        # |0|^s: 0 for s > 0, zero mode projected out for s < 0
        return multiplier

    @staticmethod
    def fractional_derivative(u: FieldState, s: float, kind: str = "homogeneous") -> FieldState:
        """D_x^s (multiplier |ξ|^s) or <D_x>^s (multiplier (1+|ξ|²)^{s/2})"""
        return SpectralService.apply_multiplier(u, SpectralService.fractional_multiplier(u.grid, s, kind))

    @staticmethod
    def derivative(u: FieldState, order: int = 1) -> FieldState:
        """Spectral ∂_x^order"""
        return SpectralService.apply_multiplier(u, (1j * u.grid.frequencies) ** order)

    @staticmethod
    def derivative_values(grid: Grid, values: np.ndarray, order: int = 1) -> np.ndarray:
        return sfft.ifft((1j * grid.frequencies) ** order * sfft.fft(values))

    @staticmethod
    def hilbert_transform(u: FieldState) -> FieldState:
        """Ĥu = -i sgn(ξ) û con sgn(0) = 0"""
        return SpectralService.apply_multiplier(u, -1j * np.sign(u.grid.frequencies))

    @staticmethod
    def free_propagate(u: FieldState, t: float) -> FieldState:
        """Flujo lineal exacto e^{it∂_x²}; avanza el tiempo en t"""
        SpectralService.require_finite(u)
        values = sfft.ifft(np.exp(-1j * u.grid.frequencies ** 2 * t) * sfft.fft(u.values))
        return u.with_values(values, time=u.time + t)

    @staticmethod
    def translate(u: FieldState, shift: float) -> FieldState:
        """u(x - shift) mediante el multiplicador de fase e^{-iξ·shift}"""
        return SpectralService.apply_multiplier(u, np.exp(-1j * u.grid.frequencies * shift))

    @staticmethod
    def dealias_mask(grid: Grid) -> np.ndarray:
        """Máscara de la regla 2/3"""
        return (np.abs(grid.frequencies) <= (2.0 / 3.0) * grid.max_frequency).astype(float)

    @staticmethod
    def resample(u: FieldState, n: int, tolerance: float = 1e-12) -> FieldState:
        """
        Interpolación espectral al mismo dominio con n puntos

        Raises:
            GridError: Si el truncamiento descarta más de `tolerance` de la masa L²
        """
        grid = SpectralService.make_grid(n, u.grid.length)
        if n == u.grid.n:
            return u.with_values(u.values)
        coefficients = sfft.fftshift(sfft.fft(u.values)) / u.grid.n
        m = u.grid.n
        if n > m:
            padded = np.zeros(n, dtype=complex)
            start = (n - m) // 2
            padded[start:start + m] = coefficients
        else:
            start = (m - n) // 2
            padded = coefficients[start:start + n]
            total = np.sum(np.abs(coefficients) ** 2)
            dropped = total - np.sum(np.abs(padded) ** 2)
            if total > 0 and dropped > tolerance * total:
                raise GridError(
                    f"resampling to n={n} drops {dropped / total:.3e} of the L2 mass (past Nyquist)"
                )
        values = sfft.ifft(sfft.ifftshift(padded)) * n
        return FieldState(grid=grid, values=values, time=u.time)

    # =========================
    # LITTLEWOOD-PALEY
    # =========================
    @staticmethod
    def phi0(xi: np.ndarray) -> np.ndarray:
        """ϕ_0: 1 si |ξ| <= 1, 0 si |ξ| >= 7/6"""
        return smooth_cutoff(xi, 1.0, RAMP_WIDTH)

    @staticmethod
    def top_index(grid: Grid) -> int:
        """j_max = floor(log2(nπ/L)) - 1"""
        return int(math.floor(math.log2(grid.max_frequency) + 1e-9)) - 1

    @staticmethod
    def make_ladder(grid: Grid) -> LPLadder:
        j_max = SpectralService.top_index(grid)
        if j_max < 1:
            raise GridError(f"grid (n={grid.n}, L={grid.length}) resolves no dyadic block above P_<=0")
        xi = grid.frequencies
        phi0 = SpectralService.phi0(xi)
        rows = [phi0]
        for j in range(1, j_max + 1):
            rows.append(SpectralService.phi0(xi / 2.0 ** j) - SpectralService.phi0(xi / 2.0 ** (j - 1)))
        return LPLadder(grid=grid, j_max=j_max, phi0=phi0, phi=np.stack(rows))

    @staticmethod
    def low_pass_multiplier(grid: Grid, k: int) -> np.ndarray:
        """P_{<k} = ϕ_0(2^{-(k-1)} ξ); cualquier k >= 1, identidad cuando 2^{k-1} cubre la malla"""
        if k < 1:
            raise ParameterError(f"P_<k needs k >= 1, got {k}")
        return SpectralService.phi0(grid.frequencies / 2.0 ** (k - 1))

    @staticmethod
    def _check_index(ladder: LPLadder, j: int, name: str = "j") -> None:
        if j is None or j < 0 or j > ladder.j_max:
            raise ParameterError(f"{name}={j} outside the ladder range [0, {ladder.j_max}]")

    @staticmethod
    def range_multiplier(ladder: LPLadder, a: int, b: int) -> np.ndarray:
        """P_{[a,b]} telescópico: ϕ_0(2^{-b}ξ) - ϕ_0(2^{-(a-1)}ξ)"""
        xi = ladder.grid.frequencies
        a = max(a, 0)
        upper = SpectralService.phi0(xi / 2.0 ** b)
        if a == 0:
            return upper
        return upper - SpectralService.phi0(xi / 2.0 ** (a - 1))

    @staticmethod
    def selector_multiplier(ladder: LPLadder, which: BlockSelector) -> np.ndarray:
        kind = which.kind
        if kind == BlockKind.LEQ0:
            return ladder.phi0
        if kind == BlockKind.BLOCK:
            SpectralService._check_index(ladder, which.j)
            return ladder.block(which.j)
        if kind == BlockKind.RANGE:
            SpectralService._check_index(ladder, which.a, "a")
            SpectralService._check_index(ladder, which.b, "b")
            if which.a > which.b:
                raise ParameterError(f"empty range [{which.a}, {which.b}]")
            return SpectralService.range_multiplier(ladder, which.a, which.b)
        if kind == BlockKind.LT:
            if which.j is None or which.j < 1 or which.j - 1 > ladder.j_max:
                raise ParameterError(f"P_<k needs 1 <= k <= {ladder.j_max + 1}, got {which.j}")
            return SpectralService.low_pass_multiplier(ladder.grid, which.j)
        if kind == BlockKind.GEQ:
            SpectralService._check_index(ladder, which.j)
            if which.j == 0:
                return np.ones(ladder.grid.n)
            return 1.0 - SpectralService.low_pass_multiplier(ladder.grid, which.j)
        if kind == BlockKind.FATTENED:
            SpectralService._check_index(ladder, which.j)
            a = max(which.j - which.width, 0)
            b = min(which.j + which.width, ladder.j_max)
            return SpectralService.range_multiplier(ladder, a, b)
        if kind == BlockKind.TAIL:
            return 1.0 - SpectralService.phi0(ladder.grid.frequencies / 2.0 ** ladder.j_max)
        raise ParameterError(f"unsupported selector {kind}")

    @staticmethod
    def lp_project(u: FieldState, ladder: LPLadder, which: BlockSelector) -> FieldState:
        if not u.grid.matches(ladder.grid):
            raise GridError("field and ladder live on different grids")
        return SpectralService.apply_multiplier(u, SpectralService.selector_multiplier(ladder, which))

    @staticmethod
    def lp_blocks(u: FieldState, ladder: LPLadder) -> list[FieldState]:
        """[P_{≤0}u, P_1u, ..., P_{j_max}u]"""
        coefficients = sfft.fft(u.values)
        return [u.with_values(sfft.ifft(row * coefficients)) for row in ladder.phi]

    @staticmethod
    def commutator_apply(f: FieldState, g: FieldState, ladder: LPLadder, j: int) -> FieldState:
        """[P_j, f]g = P_j(f·g) - f·P_j(g)"""
        SpectralService.require_same_grid(f, g)
        if not f.grid.matches(ladder.grid):
            raise GridError("fields and ladder live on different grids")
        SpectralService._check_index(ladder, j)
        block = ladder.block(j)
        product = sfft.ifft(block * sfft.fft(f.values * g.values))
        projected = sfft.ifft(block * sfft.fft(g.values))
        return g.with_values(product - f.values * projected)
