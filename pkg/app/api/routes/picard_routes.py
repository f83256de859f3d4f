from app.api.deps import get_datum, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.core import ConfigError
from app.models import Criterion, ExperimentOutcome, LabConfig
from app.services import IntegratorService

router = CommandRouter(tags=["Picard"])


@router.command("picard")
def picard(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Frozen-coefficient Picard iterates of the regularized equation

    - **model.k**: frequency truncation P_{<k} (required)
    - **experiment.n_iter**: iterates after u^(0) = 0
    - **experiment.contraction_max**: bound on d_{n+1}/d_n for n >= contraction_from
    - **experiment.scale**: multiplies the datum before the truncation
    """
    exp = config.experiment
    params = get_params(config)
    if params.regularization is None:
        raise ConfigError("model.k: picard needs a frequency truncation")
    u0 = get_datum(config)
    step = get_step(config)

    result = IntegratorService.picard_construct(
        u0, params, exp.n_iter, step, t_final=exp.t_final, scale=exp.scale
    )
    ratios = result.ratios
    ctx.store.write_table(
        "picard.csv",
        ["n", "d_n", "ratio"],
        [(n, d, ratios[n - 1] if n > 0 else "") for n, d in enumerate(result.differences)],
    )

    outcome = ExperimentOutcome()
    d0 = result.differences[0]
    if d0 == 0:
        outcome.notes.append("zero datum: every iterate vanishes")
        outcome.criteria.append(Criterion.at_most("d_0", 0.0, 0.0))
        return outcome

    checked = [
        ratio for n, ratio in enumerate(ratios)
        if n >= exp.contraction_from and result.differences[n + 1] > exp.picard_floor * d0
    ]
    if checked:
        outcome.criteria.append(Criterion.at_most("max_contraction_ratio", max(checked), exp.contraction_max))
    else:
        outcome.notes.append("iterates reached round-off before the contraction window")

    scaled = u0.with_values(exp.scale * u0.values)
    every_step = step.model_copy(update={"record_every": 1})
    reference = IntegratorService.evolve_regularized(scaled, params, exp.t_final, every_step)
    distance = IntegratorService.trajectory_distance(result.iterates[-1], reference)
    bound = exp.cross_check_factor * result.differences[-1] + exp.cross_check_floor
    ctx.store.write_table("cross_check.csv", ["distance", "bound"], [(distance, bound)])
    outcome.criteria.append(Criterion.at_most("cross_check_distance", distance, bound))
    return outcome
