import numpy as np

from app.api.deps import get_datum, get_grid, get_params, get_step
from app.api.router import CommandRouter, RunContext
from app.models import Criterion, ExperimentOutcome, FrequencyEnvelope, LabConfig
from app.services import AnalysisService, DatumService, IntegratorService, SpectralService

router = CommandRouter(prefix="envelope", tags=["Envelopes"])

SLACK = 1e-12


def envelope_violations(envelope: FrequencyEnvelope) -> dict[str, int]:
    """Counts of broken admissible / bounding / slowly-varying / square-sum conditions"""
    values = np.array(envelope.values)
    blocks = np.array(envelope.block_norms)
    index = np.arange(values.size)
    growth = 2.0 ** (envelope.delta * np.abs(index[:, None] - index[None, :]))
    return {
        "admissible": int(not (1.0 <= values[0] <= 2.0 + SLACK)),
        "bounding": int(np.sum(blocks > values * envelope.total_norm * (1 + SLACK))),
        "slowly_varying": int(np.sum(values[:, None] > growth * values[None, :] * (1 + SLACK))),
        "square_sum": int(envelope.square_sum > envelope.square_sum_bound),
    }


@router.command("report")
def envelope_report(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Frequency envelopes of a field ensemble and their defining inequalities

    - **datum.kind = random_h1**: experiment.samples seeded fields; any other kind is a single field
    - **experiment.delta / experiment.norm**: slack exponent and norm selector (l2, h1, hs:<s>)
    """
    exp = config.experiment
    grid = get_grid(config)
    ladder = SpectralService.make_ladder(grid)
    if config.datum.kind == "random_h1":
        fields = DatumService.ensemble(grid, exp.samples, config.datum.amplitude, config.datum.decay, config.datum.seed)
    else:
        fields = [get_datum(config)]

    outcome = ExperimentOutcome()
    totals = {"admissible": 0, "bounding": 0, "slowly_varying": 0, "square_sum": 0}
    rows = []
    first = None
    for sample, u in enumerate(fields):
        if not np.any(u.values):
            outcome.notes.append(f"sample {sample} is zero; envelope undefined, skipped")
            continue
        envelope = AnalysisService.frequency_envelope(u, exp.norm, exp.delta, ladder)
        first = first or envelope
        for name, count in envelope_violations(envelope).items():
            totals[name] += count
        rows.append((sample, envelope.values[0], envelope.square_sum, envelope.square_sum_bound))

    ctx.store.write_table("ensemble.csv", ["sample", "a_0", "square_sum", "square_sum_bound"], rows)
    if first is None:
        ctx.store.write_table("envelope.csv", ["j", "a_j", "block_norm"], [])
        return outcome
    ctx.store.write_table(
        "envelope.csv",
        ["j", "a_j", "block_norm"],
        [(j, a, norm) for j, (a, norm) in enumerate(zip(first.values, first.block_norms))],
    )
    for name, count in totals.items():
        outcome.criteria.append(Criterion.at_most(f"{name}_violations", count, 0))
    return outcome


@router.command("propagation")
def envelope_propagation(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Growth of the blocks of u(t) against the frequency envelope of u0

    - **experiment.delta / experiment.norm**: envelope of the datum (l2, h1, hs:<s>)
    - **experiment.envelope_growth_max**: bound on max_t max_j ‖P_j u(t)‖_X / (a_j ‖u0‖_X)
    """
    exp = config.experiment
    params = get_params(config)
    u0 = get_datum(config)
    evolve = IntegratorService.evolve_regularized if params.regularization is not None else IntegratorService.evolve
    traj = evolve(u0, params, exp.t_final, get_step(config))

    track = AnalysisService.envelope_propagation(traj, exp.norm, exp.delta)
    ctx.store.write_table("propagation.csv", ["t", "max_block_ratio"], zip(track.times, track.ratios))
    outcome = ExperimentOutcome(notes=[f"worst block j={track.worst_block}"])
    outcome.criteria.append(Criterion.at_most("envelope_growth", track.worst, exp.envelope_growth_max))
    return outcome
