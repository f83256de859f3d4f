import hashlib
import json
import math
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.config import settings

from app.models.params import ModelParams, NonlinearitySign, Regularization, StepConfig, TimeCutoff


# =========================
# CONFIG SECTIONS
# =========================
class GridSection(BaseModel):
    """[grid]"""
    model_config = ConfigDict(extra="forbid")

    n: int = 256
    length: float = 2 * math.pi


class ModelSection(BaseModel):
    """[model]"""
    model_config = ConfigDict(extra="forbid")

    sigma: float = Field(default=1.0, gt=0)
    b: float = 0.0
    sign: NonlinearitySign = NonlinearitySign.GDNLS
    nonlinear: bool = True
    unsafe_sigma: bool = False
    k: Optional[int] = Field(default=None, ge=1)  # P_<k; None means no regularization
    eta_inner: float = Field(default=1.0, gt=0)
    eta_outer: float = Field(default=2.0, gt=0)

    def to_params(self) -> ModelParams:
        regularization = None
        if self.k is not None:
            regularization = Regularization(k=self.k, eta=TimeCutoff(inner=self.eta_inner, outer=self.eta_outer))
        return ModelParams(
            sigma=self.sigma,
            b=self.b,
            sign=self.sign,
            regularization=regularization,
            nonlinear=self.nonlinear,
            unsafe_sigma=self.unsafe_sigma,
        )


class StepSection(BaseModel):
    """[step]"""
    model_config = ConfigDict(extra="forbid")

    dt: float = Field(default=1e-3, gt=0)
    dealias: bool = True
    record_every: int = Field(default=10, ge=1)
    blowup_factor: float = Field(default_factory=lambda: settings.BLOWUP_FACTOR, gt=1)

    def to_step(self) -> StepConfig:
        return StepConfig(**self.model_dump())


DatumKind = Literal["zero", "gaussian", "sech", "kink", "plane_wave", "random_h1", "soliton"]


class DatumSection(BaseModel):
    """[datum]: initial field u0"""
    model_config = ConfigDict(extra="forbid")

    kind: DatumKind = "gaussian"
    amplitude: float = 0.5
    width: float = 1.0
    center: float = 0.0
    wavenumber: float = 0.0  # carrier e^{ikx}; the plane wave needs kL/(2π) integral
    decay: float = Field(default=2.0, gt=0.5)  # random_h1: |û| ~ <ξ>^{-decay}
    seed: int = 0


class ExperimentSection(BaseModel):
    """[experiment]: horizon, experiment knobs and every tolerance"""
    model_config = ConfigDict(extra="forbid")

    t_final: float = Field(default=1.0, gt=0)
    seed: int = 0
    binary_snapshots: bool = False  # u0 / u_final as GDNLS1 binaries instead of CSV

    # soliton-propagation
    omega: float = 1.0
    c: float = 1.0
    soliton_tolerance: float = 1e-4
    refinements: int = Field(default=1, ge=0)
    order_min: float = 3.5
    convergence_floor: float = 1e-10  # errors below this are the spatial floor
    residual_tolerance: float = 1e-6

    # conservation-drift
    drift_floor: float = 1e-13
    orbit_drift_max: float = 1e-12

    # regularization-convergence
    cutoffs: List[int] = Field(default_factory=lambda: [8, 16, 32, 64])
    ratio_max: float = 0.7

    # picard
    n_iter: int = Field(default=6, ge=2)
    contraction_max: float = 0.5
    contraction_from: int = Field(default=2, ge=0)
    cross_check_factor: float = 10.0
    cross_check_floor: float = 1e-9
    picard_floor: float = 1e-12  # d_n / d_0 below this is round-off
    scale: float = Field(default=1.0, gt=0)  # multiplies the datum

    # scaling-symmetry
    lambdas: List[float] = Field(default_factory=lambda: [0.5, 2.0])
    scaling_factor: float = 10.0
    error_floor: float = 1e-12
    critical_norm_tolerance: float = 1e-9

    # gauge-check
    residual_max: float = 1e-4
    residual_order_min: float = 2.0
    residual_floor: float = 1e-10
    modulus_tolerance: float = 1e-12
    partial_j: Optional[int] = None

    # lipschitz-probe
    epsilons: List[float] = Field(default_factory=lambda: [1e-2, 1e-3, 1e-4])
    lipschitz_factor: float = 2.0

    # envelope-report
    delta: float = Field(default=0.1, gt=0)
    norm: str = "l2"
    samples: int = Field(default=100, ge=1)

    # modulation-report
    block: int = 5
    width: int = 4
    low_min: float = 0.9
    hann_window: bool = False

    # lp-audit
    bernstein_s: List[float] = Field(default_factory=lambda: [-1.0, 0.5, 1.0, 2.0])
    partition_tolerance: float = 1e-12
    commutator_max: float = 10.0
    commutator_modes: int = Field(default=4, ge=1)

    # envelope-propagation
    envelope_growth_max: float = 4.0

    # continuity
    continuity_s: List[float] = Field(default_factory=lambda: [0.0, 1.0])
    continuity_max: float = 4.0

    # energy-estimate
    estimate_s: float = 1.0
    estimate_slack: float = 1e-3

    # energy-bound
    margin: float = 2.0

    @field_validator("cutoffs")
    @classmethod
    def cutoffs_dyadic(cls, value: List[int]) -> List[int]:
        for cutoff in value:
            if cutoff < 1 or cutoff & (cutoff - 1):
                raise ValueError(f"cutoff {cutoff} is not a power of two")
        return value


class SweepSection(BaseModel):
    """[sweep]: Cartesian product of dotted config keys"""
    model_config = ConfigDict(extra="forbid")

    command: str
    parameters: Dict[str, List[Any]] = Field(default_factory=dict)


# =========================
# LAB CONFIG
# =========================
class LabConfig(BaseModel):
    """Fully resolved experiment configuration"""
    model_config = ConfigDict(extra="forbid")

    grid: GridSection = Field(default_factory=GridSection)
    model: ModelSection = Field(default_factory=ModelSection)
    step: StepSection = Field(default_factory=StepSection)
    datum: DatumSection = Field(default_factory=DatumSection)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    sweep: Optional[SweepSection] = None

    def digest(self) -> str:
        """sha256 of the canonical JSON dump"""
        payload = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def with_overrides(self, overrides: Dict[str, Any]) -> "LabConfig":
        """Copy with dotted keys (`model.sigma`) replaced; the result is re-validated"""
        data = self.model_dump(mode="json")
        for key, value in overrides.items():
            section, _, name = key.partition(".")
            if not name or section not in data or data[section] is None:
                raise KeyError(key)
            data[section][name] = value
        return LabConfig.model_validate(data)

    def with_seed(self, seed: int) -> "LabConfig":
        return self.with_overrides({"datum.seed": seed, "experiment.seed": seed})


# =========================
# OUTCOMES & MANIFEST
# =========================
class RunStatus(str, Enum):
    RUNNING = "running"
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


class Criterion(BaseModel):
    """One pass/fail check of an experiment"""
    name: str
    value: float
    threshold: float
    comparison: Literal["<=", ">="] = "<="
    passed: bool

    @classmethod
    def at_most(cls, name: str, value: float, threshold: float) -> "Criterion":
        return cls(name=name, value=value, threshold=threshold, comparison="<=", passed=bool(value <= threshold))

    @classmethod
    def at_least(cls, name: str, value: float, threshold: float) -> "Criterion":
        return cls(name=name, value=value, threshold=threshold, comparison=">=", passed=bool(value >= threshold))


class ExperimentOutcome(BaseModel):
    """What a command handler hands back to the harness"""
    criteria: List[Criterion] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(criterion.passed for criterion in self.criteria)


class RunManifest(BaseModel):
    """manifest.json of a run directory"""
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=1, alias="schema")
    experiment: str
    config: Dict[str, Any]
    code_version: str
    started_at: datetime
    finished_at: Optional[datetime] = None
    wall_clock_s: Optional[float] = None
    status: RunStatus = RunStatus.RUNNING
    criteria: List[Criterion] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    error: Optional[str] = None
