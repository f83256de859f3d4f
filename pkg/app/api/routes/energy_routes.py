from app.api.deps import get_datum, get_grid, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.models import Criterion, ExperimentOutcome, LabConfig
from app.services import AnalysisService, DatumService, IntegratorService

router = CommandRouter(prefix="energy", tags=["Energy"])


@router.command("bound")
def energy_bound(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Spot check of E(u) ≥ ¼‖u_x‖² - C·M(u)^{(1+σ)/(2(1-σ))}

    - **experiment.samples**: size of the calibration and of the validation ensemble
    - **experiment.margin**: validation must stay below margin × calibrated C
    """
    exp = config.experiment
    params = get_params(config)
    grid = get_grid(config)
    datum = config.datum
    calibration = DatumService.ensemble(grid, exp.samples, datum.amplitude, datum.decay, datum.seed)
    validation = DatumService.ensemble(grid, exp.samples, datum.amplitude, datum.decay, datum.seed + 1)

    report = AnalysisService.energy_bound_calibration(calibration, validation, params, exp.margin)
    ctx.store.write_table(
        "energy_bound.csv",
        ["sigma", "exponent", "calibrated_constant", "margin", "worst_validation_ratio"],
        [(report.sigma, report.exponent, report.calibrated_constant, report.margin, report.worst_validation_ratio)],
    )
    return ExperimentOutcome(criteria=[
        Criterion.at_most(
            "worst_validation_ratio", report.worst_validation_ratio, report.margin * report.calibrated_constant
        )
    ])


@router.command("estimate")
def energy_estimate(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Audit of ‖u(t)‖_{H^s} <= ‖u0‖_{H^s} + ∫_0^t ‖N(u)‖_{H^s} along the flow

    - **experiment.estimate_s**: Sobolev index
    - **experiment.estimate_slack**: allowed relative excess from the trapezoid rule
    """
    exp = config.experiment
    params = get_params(config)
    u0 = get_datum(config)
    evolve = IntegratorService.evolve_regularized if params.regularization is not None else IntegratorService.evolve
    traj = evolve(u0, params, exp.t_final, get_step(config))

    report = AnalysisService.energy_estimate(traj, params, exp.estimate_s)
    ctx.store.write_table("estimate.csv", ["t", "hs_norm", "duhamel_bound"], report.rows)
    return ExperimentOutcome(criteria=[
        Criterion.at_most("estimate_ratio", report.worst_ratio, 1.0 + exp.estimate_slack)
    ])
