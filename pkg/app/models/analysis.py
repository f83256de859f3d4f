from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DerivativeKind(str, Enum):
    NONE = "none"
    HOMOGENEOUS = "homogeneous"      # D_x^s
    INHOMOGENEOUS = "inhomogeneous"  # <D_x>^s


class NormOrder(str, Enum):
    TIME_OUTER = "time-outer"    # L^p_T L^q_x
    SPACE_OUTER = "space-outer"  # L^p_x L^q_T


# =========================
# NORM SPECS
# =========================
class MixedNormSpec(BaseModel):
    """L^p_T L^q_x or L^p_x L^q_T with an optional derivative applied first"""
    model_config = ConfigDict(frozen=True)

    order: NormOrder = NormOrder.TIME_OUTER
    p_outer: float = Field(default=2.0, ge=1)   # float("inf") allowed
    q_inner: float = Field(default=2.0, ge=1)
    derivative: DerivativeKind = DerivativeKind.NONE
    s: float = 0.0
    block: Optional[int] = None  # apply P_j (0 means P_{≤0}) before the norm

    def label(self) -> str:
        outer, inner = ("T", "x") if self.order == NormOrder.TIME_OUTER else ("x", "T")
        return f"L^{self.p_outer}_{outer} L^{self.q_inner}_{inner}"


# =========================
# REPORTS
# =========================
class FrequencyEnvelope(BaseModel):
    """a_j = 2^{-δj} + ||u||_X^{-1} max_k 2^{-δ|j-k|} ||P_k u||_X for j = 0..j_max"""
    model_config = ConfigDict(frozen=True)

    delta: float = Field(gt=0)
    values: List[float]
    block_norms: List[float]
    total_norm: float
    norm_used: str
    square_sum: float
    square_sum_bound: float

    @model_validator(mode="after")
    def check_lengths(self) -> "FrequencyEnvelope":
        if len(self.values) != len(self.block_norms):
            raise ValueError("one envelope value per block")
        return self


class ModulationReport(BaseModel):
    """Energy split of P_j u between S̃_{2j} (low modulation) and its complement"""
    model_config = ConfigDict(frozen=True)

    j: int
    width: int
    low: float
    high: float
    empty: bool = False


class BernsteinReport(BaseModel):
    """Extremes of ||D^s P_j u|| / (2^{js} ||P_j u||) over a random ensemble"""
    model_config = ConfigDict(frozen=True)

    s: float
    samples: int
    min_ratio: float
    max_ratio: float
    lower: float
    upper: float
    per_block: List[tuple[int, float, float]]

    @property
    def passed(self) -> bool:
        return self.lower <= self.min_ratio and self.max_ratio <= self.upper


class EnergyBoundReport(BaseModel):
    """E(u) ≥ ¼||u_x||² - C·M^p, C calibrated on one ensemble and checked on another"""
    model_config = ConfigDict(frozen=True)

    sigma: float
    exponent: float
    calibrated_constant: float
    margin: float
    worst_validation_ratio: float
    passed: bool


class CommutatorReport(BaseModel):
    """Worst ||[P_j, f]g|| / (2^{-j} ||f_x||_∞ ||g||) per block over a random ensemble"""
    model_config = ConfigDict(frozen=True)

    samples: int
    worst: float
    bound: float
    per_block: List[tuple[int, float]]


class SmoothingReport(BaseModel):
    """||P_j D^{1/2} u||_{L^∞_x L²_T} against ||u(t_0)||_{L²} for the free flow"""
    model_config = ConfigDict(frozen=True)

    j: int
    value: float
    initial: float
    ratio: float
    bound: float
    resolved: bool  # the snapshot spacing separates every temporal frequency of the block


class EnvelopeTrack(BaseModel):
    """max_j ||P_j u(t)||_X / (a_j ||u(t_0)||_X) at each snapshot, a_j the envelope of u(t_0)"""
    model_config = ConfigDict(frozen=True)

    delta: float
    norm_used: str
    times: List[float]
    ratios: List[float]
    worst: float
    worst_block: int


class ContinuityReport(BaseModel):
    """||u_1 - u_2||_{L^∞_T H^s} / ||u_1(0) - u_2(0)||_{H^s}"""
    model_config = ConfigDict(frozen=True)

    s: float
    initial: float
    distance: float
    ratio: float


class EnergyEstimateReport(BaseModel):
    """||u(t)||_{H^s} against ||u(0)||_{H^s} + ∫_0^t ||N(u)||_{H^s} at each snapshot"""
    model_config = ConfigDict(frozen=True)

    s: float
    rows: List[tuple[float, float, float]]  # (t, lhs, rhs)
    worst_ratio: float
