from app.api.deps import get_datum, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.models import Criterion, ExperimentOutcome, LabConfig
from app.services import AnalysisService, IntegratorService, SpectralService

router = CommandRouter(prefix="modulation", tags=["Modulation"])


@router.command("report")
def modulation_report(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Low/high modulation split of the flow of P_j u0

    - **experiment.block / experiment.width**: block j and the window S_{[2j-w, 2j+w]}
    - **experiment.low_min**: bound on the low-modulation fraction
    - **experiment.hann_window**: extra Hann window on top of the time cutoff (off by default)
    - **model.nonlinear = false**: also checks the local smoothing bound of the block
    """
    exp = config.experiment
    params = get_params(config)
    u0 = get_datum(config)
    ladder = SpectralService.make_ladder(u0.grid)
    SpectralService._check_index(ladder, exp.block, "experiment.block")
    start = SpectralService.apply_multiplier(u0, ladder.block(exp.block))
    traj = IntegratorService.evolve(start, params, exp.t_final, get_step(config))

    compact = AnalysisService.time_cutoff(traj)
    report = AnalysisService.modulation_split(compact, exp.block, exp.width, ladder, hann=exp.hann_window)
    ctx.store.write_table("modulation.csv", ["j", "low_frac", "high_frac"], [(report.j, report.low, report.high)])
    outcome = ExperimentOutcome()
    if report.empty:
        outcome.notes.append(f"P_{exp.block} of the trajectory is empty; fractions undefined")
        return outcome
    outcome.criteria.append(Criterion.at_least("low_fraction", report.low, exp.low_min))
    outcome.criteria.append(Criterion.at_most("fraction_sum_defect", abs(report.low + report.high - 1.0), 1e-12))

    if params.nonlinear:
        return outcome
    smoothing = AnalysisService.local_smoothing(traj, exp.block, ladder)
    ctx.store.write_table(
        "smoothing.csv",
        ["j", "linf_x_l2_t", "initial_l2", "ratio", "bound"],
        [(smoothing.j, smoothing.value, smoothing.initial, smoothing.ratio, smoothing.bound)],
    )
    if smoothing.resolved:
        outcome.criteria.append(Criterion.at_most("local_smoothing_ratio", smoothing.ratio, smoothing.bound))
    else:
        outcome.notes.append("snapshot spacing aliases the block's temporal frequencies; smoothing not assessed")
    return outcome
