from typing import List

from app.api.deps import get_datum, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.models import Criterion, ExperimentOutcome, LabConfig, Trajectory
from app.services import IntegratorService

router = CommandRouter(prefix="conservation", tags=["Conservation"])

QUANTITIES = ("mass", "momentum", "energy")


def drift_series(traj: Trajectory) -> List[tuple[float, float, float, float]]:
    """(t, mass, momentum, energy) relative drifts; mass relative to M(0), the others to 1 + |Q(0)|"""
    first = traj.ledger[0]
    mass_scale = first.mass if first.mass > 0 else 1.0
    rows = []
    for row in traj.ledger:
        rows.append((
            row.t,
            abs(row.mass - first.mass) / mass_scale,
            abs(row.momentum - first.momentum) / (1.0 + abs(first.momentum)),
            abs(row.energy - first.energy) / (1.0 + abs(first.energy)),
        ))
    return rows


@router.command("drift")
def conservation_drift(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Drift of mass, momentum and energy, and its order under dt halving

    - **datum.kind = plane_wave**: exact orbit, drifts must stay below experiment.orbit_drift_max
    - otherwise the observed order must reach experiment.order_min unless the drift is below drift_floor
    """
    exp = config.experiment
    params = get_params(config)
    u0 = get_datum(config)
    levels = max(exp.refinements, 1)
    dts = [config.step.dt / 2 ** level for level in range(levels + 1)]

    worst = []
    for level, dt in enumerate(dts):
        traj = IntegratorService.evolve(u0, params, exp.t_final, get_step(config, dt))
        series = drift_series(traj)
        worst.append([max(row[i + 1] for row in series) for i in range(len(QUANTITIES))])
        if level == 0:
            ctx.store.write_table("drift.csv", ["t", "mass_drift", "momentum_drift", "energy_drift"], series)
            ctx.store.write_ledger("ledger.csv", traj)
            ctx.store.write_endpoints(u0, traj.final, exp.binary_snapshots)

    outcome = ExperimentOutcome()
    rows = []
    for level, dt in enumerate(dts):
        rows.append((dt, *worst[level]))
    ctx.store.write_table("orders.csv", ["dt", "mass_drift", "momentum_drift", "energy_drift"], rows)

    if config.datum.kind == "plane_wave":
        for i, name in enumerate(QUANTITIES):
            outcome.criteria.append(Criterion.at_most(f"{name}_orbit_drift", worst[0][i], exp.orbit_drift_max))
        return outcome

    for i, name in enumerate(QUANTITIES):
        drifts = [level[i] for level in worst]
        if drifts[-1] <= exp.drift_floor:
            outcome.criteria.append(Criterion.at_most(f"{name}_drift", drifts[-1], exp.drift_floor))
            continue
        orders = IntegratorService.measure_order(drifts, dts)
        outcome.criteria.append(Criterion.at_least(f"{name}_order", min(orders), exp.order_min))
    return outcome
