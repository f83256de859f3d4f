import numpy as np

from app.api.deps import get_datum, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.models import Criterion, ExperimentOutcome, LabConfig
from app.services import DatumService, IntegratorService

router = CommandRouter(prefix="lipschitz", tags=["Lipschitz"])


@router.command("probe")
def lipschitz_probe(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    ‖u_1 - u_2‖_{L^∞_T L²} / ‖u_1(0) - u_2(0)‖_{L²} for shrinking perturbations

    - **experiment.epsilons**: perturbation sizes along one seeded direction
    - **experiment.lipschitz_factor**: allowed spread max/min of the ratios
    """
    exp = config.experiment
    params = get_params(config)
    u0 = get_datum(config)
    step = get_step(config)
    evolve = IntegratorService.evolve_regularized if params.regularization is not None else IntegratorService.evolve

    direction = DatumService.random_h1(u0.grid, 1.0, config.datum.decay, np.random.default_rng(exp.seed))
    direction = direction.with_values(direction.values / np.sqrt(np.sum(np.abs(direction.values) ** 2) * u0.grid.dx))
    base = evolve(u0, params, exp.t_final, step)

    rows = []
    for epsilon in exp.epsilons:
        perturbed = u0.with_values(u0.values + epsilon * direction.values)
        traj = evolve(perturbed, params, exp.t_final, step)
        initial = IntegratorService.l2_distance(base.states[0], traj.states[0])
        distance = IntegratorService.trajectory_distance(base, traj)
        rows.append((epsilon, initial, distance, distance / initial))
    ctx.store.write_table("lipschitz.csv", ["epsilon", "initial_l2", "linf_l2_distance", "ratio"], rows)

    ratios = [row[3] for row in rows]
    spread = max(ratios) / min(ratios)
    return ExperimentOutcome(criteria=[Criterion.at_most("ratio_spread", spread, exp.lipschitz_factor)])
