from app.api.deps import get_grid
from app.api.router import CommandRouter, RunContext
from app.models import Criterion, ExperimentOutcome, LabConfig
from app.services import AnalysisService, DatumService, SpectralService

router = CommandRouter(prefix="lp", tags=["Littlewood-Paley"])


@router.command("audit")
def lp_audit(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Partition of unity, disjoint supports, Bernstein brackets and commutator constants of the ladder

    - **experiment.samples**: random fields per check
    - **experiment.partition_tolerance**: bound on the relative reconstruction defect
    - **experiment.bernstein_s**: exponents s of the Bernstein brackets
    - **experiment.commutator_max / commutator_modes**: bound on the commutator constant and the wavenumbers of f
    """
    exp = config.experiment
    grid = get_grid(config)
    ladder = SpectralService.make_ladder(grid)
    outcome = ExperimentOutcome(notes=[f"j_max={ladder.j_max}"])

    fields = DatumService.ensemble(grid, exp.samples, config.datum.amplitude, config.datum.decay, exp.seed)
    defects = [(sample, AnalysisService.partition_defect(u, ladder)) for sample, u in enumerate(fields)]
    ctx.store.write_table("partition.csv", ["sample", "relative_defect"], defects)
    outcome.criteria.append(Criterion.at_most("partition_defect", max(d for _, d in defects), exp.partition_tolerance))
    outcome.criteria.append(Criterion.at_most("block_overlap", AnalysisService.block_overlap(ladder), 0.0))

    rows = []
    for s in exp.bernstein_s:
        report = AnalysisService.bernstein_audit(ladder, s, exp.samples, seed=exp.seed)
        rows.extend((s, j, low, high, report.lower, report.upper) for j, low, high in report.per_block)
        outcome.criteria.append(Criterion.at_least(f"bernstein_min_s_{s:g}", report.min_ratio, report.lower))
        outcome.criteria.append(Criterion.at_most(f"bernstein_max_s_{s:g}", report.max_ratio, report.upper))
    ctx.store.write_table("bernstein.csv", ["s", "j", "min_ratio", "max_ratio", "lower", "upper"], rows)

    commutator = AnalysisService.commutator_audit(ladder, exp.samples, exp.seed, exp.commutator_modes)
    ctx.store.write_table("commutator.csv", ["j", "worst_constant"], commutator.per_block)
    outcome.criteria.append(Criterion.at_most("commutator_constant", commutator.worst, exp.commutator_max))
    if exp.commutator_max > commutator.bound:
        outcome.notes.append(f"commutator_max exceeds the ramp bound {commutator.bound:.6g}")
    return outcome
