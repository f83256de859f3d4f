import math

from app.api.deps import get_datum, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.core import ConfigError
from app.models import Criterion, ExperimentOutcome, LabConfig, Regularization, TimeCutoff
from app.services import IntegratorService

router = CommandRouter(prefix="regularization", tags=["Regularization"])


def cutoff_index(frequency: int) -> int:
    """P_{<k} passing |ξ| <= K = 2^{k-1}"""
    return int(round(math.log2(frequency))) + 1


@router.command("convergence")
def regularization_convergence(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Regularized flows for increasing cutoffs K and their successive distances

    - **experiment.cutoffs**: frequencies K (powers of two), mapped to P_{<log2 K + 1}
    - **experiment.ratio_max**: bound on d_{i+1}/d_i
    """
    exp = config.experiment
    if len(exp.cutoffs) < 3:
        raise ConfigError("experiment.cutoffs: at least three cutoffs are needed for a distance ratio")
    base = get_params(config)
    cutoff = TimeCutoff(inner=config.model.eta_inner, outer=config.model.eta_outer)
    u0 = get_datum(config)
    step = get_step(config)

    trajectories = []
    for frequency in exp.cutoffs:
        params = base.model_copy(update={"regularization": Regularization(k=cutoff_index(frequency), eta=cutoff)})
        trajectories.append(IntegratorService.evolve_regularized(u0, params, exp.t_final, step))

    pairs = []
    for a in range(len(exp.cutoffs)):
        for b in range(a + 1, len(exp.cutoffs)):
            distance = IntegratorService.trajectory_distance(trajectories[a], trajectories[b])
            pairs.append((exp.cutoffs[a], exp.cutoffs[b], distance))
    ctx.store.write_table("distances.csv", ["k_low", "k_high", "linf_l2_distance"], pairs)
    finest = trajectories[-1]
    ctx.store.write_endpoints(finest.states[0], finest.final, exp.binary_snapshots)

    successive = [
        IntegratorService.trajectory_distance(first, second)
        for first, second in zip(trajectories[:-1], trajectories[1:])
    ]
    ratios = [
        later / earlier if earlier > 0 else 0.0
        for earlier, later in zip(successive[:-1], successive[1:])
    ]
    ctx.store.write_table(
        "successive.csv",
        ["k_low", "k_high", "distance", "ratio"],
        [
            (exp.cutoffs[i], exp.cutoffs[i + 1], d, ratios[i - 1] if i > 0 else "")
            for i, d in enumerate(successive)
        ],
    )
    outcome = ExperimentOutcome()
    if max(successive) == 0:
        outcome.notes.append("every cutoff is inactive on this grid; distances vanish")
        outcome.criteria.append(Criterion.at_most("max_distance", 0.0, 0.0))
        return outcome
    outcome.criteria.append(Criterion.at_most("max_successive_ratio", max(ratios), exp.ratio_max))
    return outcome
