import numpy as np

from app.api.deps import get_datum, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.models import Criterion, ExperimentOutcome, LabConfig
from app.services import AnalysisService, DatumService, IntegratorService

router = CommandRouter(tags=["Continuity"])


@router.command("continuity")
def continuity(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Difference estimate ‖u_1 - u_2‖_{L^∞_T H^s} <= C ‖u_1(0) - u_2(0)‖_{H^s}

    - **experiment.epsilons**: perturbation sizes along one seeded direction
    - **experiment.continuity_s**: Sobolev indices s of the distance
    - **experiment.continuity_max**: bound on C
    """
    exp = config.experiment
    params = get_params(config)
    u0 = get_datum(config)
    step = get_step(config)
    evolve = IntegratorService.evolve_regularized if params.regularization is not None else IntegratorService.evolve

    direction = DatumService.random_h1(u0.grid, 1.0, config.datum.decay, np.random.default_rng(exp.seed))
    direction = direction.with_values(direction.values / AnalysisService.sobolev_norm(direction, 0.0))
    base = evolve(u0, params, exp.t_final, step)

    rows = []
    for epsilon in exp.epsilons:
        traj = evolve(u0.with_values(u0.values + epsilon * direction.values), params, exp.t_final, step)
        for s in exp.continuity_s:
            report = AnalysisService.continuity(base, traj, s)
            rows.append((epsilon, s, report.initial, report.distance, report.ratio))
    ctx.store.write_table("continuity.csv", ["epsilon", "s", "initial_hs", "linf_hs_distance", "ratio"], rows)

    outcome = ExperimentOutcome()
    for s in exp.continuity_s:
        worst = max(row[4] for row in rows if row[1] == s)
        outcome.criteria.append(Criterion.at_most(f"continuity_constant_s_{s:g}", worst, exp.continuity_max))
    return outcome
