# =========================
# MODELS EXPORTS
# =========================

# Grid & field models
from .grid import (
    Grid,
    FieldState
)

# Littlewood-Paley models
from .ladder import (
    BlockKind,
    BlockSelector,
    LPLadder
)

# Evolution-law models
from .params import (
    ModelParams,
    NonlinearitySign,
    Regularization,
    StepConfig,
    TimeCutoff
)

# Soliton models
from .soliton import (
    SolitonBranch,
    SolitonSpec
)

# Trajectory models
from .trajectory import (
    LEDGER_HEADER,
    LedgerRow,
    PicardResult,
    Trajectory
)

# Gauge models
from .gauge import (
    AmplitudeCutoffs,
    GaugePhase
)

# Analysis models
from .analysis import (
    BernsteinReport,
    CommutatorReport,
    ContinuityReport,
    DerivativeKind,
    EnergyBoundReport,
    EnergyEstimateReport,
    EnvelopeTrack,
    FrequencyEnvelope,
    MixedNormSpec,
    ModulationReport,
    NormOrder,
    SmoothingReport
)

# Experiment & manifest models
from .experiment import (
    Criterion,
    DatumSection,
    ExperimentOutcome,
    ExperimentSection,
    GridSection,
    LabConfig,
    ModelSection,
    RunManifest,
    RunStatus,
    StepSection,
    SweepSection
)


__all__ = [
    # Grid
    "Grid", "FieldState",

    # Littlewood-Paley
    "BlockKind", "BlockSelector", "LPLadder",

    # Params
    "ModelParams", "NonlinearitySign", "Regularization", "StepConfig", "TimeCutoff",

    # Soliton
    "SolitonBranch", "SolitonSpec",

    # Trajectory
    "LEDGER_HEADER", "LedgerRow", "PicardResult", "Trajectory",

    # Gauge
    "AmplitudeCutoffs", "GaugePhase",

    # Analysis
    "BernsteinReport", "CommutatorReport", "ContinuityReport", "DerivativeKind", "EnergyBoundReport",
    "EnergyEstimateReport", "EnvelopeTrack", "FrequencyEnvelope", "MixedNormSpec", "ModulationReport",
    "NormOrder", "SmoothingReport",

    # Experiment
    "Criterion", "DatumSection", "ExperimentOutcome", "ExperimentSection", "GridSection",
    "LabConfig", "ModelSection", "RunManifest", "RunStatus", "StepSection", "SweepSection",
]
