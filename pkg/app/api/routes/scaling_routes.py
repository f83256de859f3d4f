from app.api.deps import get_datum, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.core import ConfigError
from app.models import Criterion, ExperimentOutcome, LabConfig
from app.services import AnalysisService, IntegratorService, ModelService

router = CommandRouter(prefix="scaling", tags=["Scaling"])


@router.command("symmetry")
def scaling_symmetry(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Commutation of the flow with u -> λ^{1/(2σ)}u(λ²t, λx)

    - **experiment.lambdas**: scaling factors
    - **experiment.scaling_factor**: allowed multiple of the measured solver error
    """
    exp = config.experiment
    params = get_params(config)
    if params.regularization is not None:
        raise ConfigError("model.k: the time cutoff breaks the scaling symmetry; drop the regularization")
    u0 = get_datum(config)
    step = get_step(config)
    halved = get_step(config, config.step.dt / 2)
    sigma = params.sigma
    s_c = ModelService.critical_index(sigma)

    outcome = ExperimentOutcome(notes=[f"critical index s_c={s_c:.17g}"])
    rows = []
    for lam in exp.lambdas:
        scaled0 = ModelService.rescale(u0, lam, sigma)
        critical = AnalysisService.sobolev_norm(u0, s_c, "homogeneous")
        critical_scaled = AnalysisService.sobolev_norm(scaled0, s_c, "homogeneous")
        norm_drift = abs(critical_scaled - critical) / critical if critical > 0 else abs(critical_scaled)

        horizon = lam ** 2 * exp.t_final
        lhs = IntegratorService.evolve(scaled0, params, exp.t_final, step).final
        lhs_fine = IntegratorService.evolve(scaled0, params, exp.t_final, halved).final
        rhs = ModelService.rescale(IntegratorService.evolve(u0, params, horizon, step).final, lam, sigma)
        rhs_fine = ModelService.rescale(IntegratorService.evolve(u0, params, horizon, halved).final, lam, sigma)

        difference = IntegratorService.l2_distance(lhs, rhs)
        solver_error = max(IntegratorService.l2_distance(lhs, lhs_fine), IntegratorService.l2_distance(rhs, rhs_fine))
        bound = exp.scaling_factor * solver_error + exp.error_floor
        rows.append((lam, difference, solver_error, bound, norm_drift))
        outcome.criteria.append(Criterion.at_most(f"commutation_lambda_{lam:g}", difference, bound))
        outcome.criteria.append(Criterion.at_most(f"critical_norm_lambda_{lam:g}", norm_drift, exp.critical_norm_tolerance))

    ctx.store.write_table(
        "scaling.csv", ["lambda", "difference", "solver_error", "bound", "critical_norm_drift"], rows
    )
    return outcome
