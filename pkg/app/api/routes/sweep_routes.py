import itertools
import logging
from multiprocessing import Pool
from typing import Any, Dict, List, Tuple

from pydantic import ValidationError

from app.api.router import CommandRouter, RunContext, summarize
from app.core import ConfigError, describe_validation_error
from app.models import Criterion, ExperimentOutcome, LabConfig, RunStatus

logger = logging.getLogger(__name__)

router = CommandRouter(tags=["Sweeps"])


def sweep_points(parameters: Dict[str, List[Any]]) -> List[Dict[str, Any]]:
    """Cartesian product of the declared lists, first key varying slowest"""
    keys = list(parameters)
    return [dict(zip(keys, values)) for values in itertools.product(*(parameters[key] for key in keys))]


def run_point(task: Tuple[str, str, str]) -> Tuple[str, List[dict]]:
    """Worker: one experiment per sweep point; owns its run directory"""
    from app.api import lab

    command, payload, root = task
    config = LabConfig.model_validate_json(payload)
    manifest = lab.execute(command, config, root)
    return manifest.status.value, [criterion.model_dump() for criterion in manifest.criteria]


@router.command("sweep")
def sweep(config: LabConfig, ctx: RunContext) -> ExperimentOutcome:
    """
    Run a command over the Cartesian product of [sweep].parameters

    - **sweep.command**: any registered command except sweep
    - **sweep.parameters**: dotted keys (`model.sigma`) mapped to value lists
    - **--jobs**: worker processes; the parent alone writes the summary
    """
    from app.api import lab

    if config.sweep is None:
        raise ConfigError("sweep: section is required")
    command = config.sweep.command
    if command == "sweep":
        raise ConfigError("sweep.command: sweeps do not nest")
    lab.get(command)

    base = config.model_copy(update={"sweep": None})
    points = sweep_points(config.sweep.parameters)
    tasks = []
    for point in points:
        try:
            resolved = base.with_overrides(point)
        except KeyError as exc:
            raise ConfigError(f"sweep.parameters: unknown key {exc}")
        except ValidationError as exc:
            raise ConfigError(describe_validation_error(exc, "sweep"))
        tasks.append((command, resolved.model_dump_json(), str(ctx.store.path / "points")))

    logger.info(f"sweep over {len(tasks)} points of {command} with {ctx.jobs} job(s)")
    if ctx.jobs == 1:
        results = [run_point(task) for task in tasks]
    else:
        with Pool(processes=ctx.jobs) as pool:
            results = pool.map(run_point, tasks)

    keys = list(config.sweep.parameters)
    rows = []
    passed = 0
    for point, (status, criteria) in zip(points, results):
        verdict = summarize([Criterion.model_validate(item) for item in criteria]) if criteria else status
        rows.append([point[key] for key in keys] + [status, verdict])
        passed += status == RunStatus.PASSED.value
    ctx.store.write_table("sweep.csv", keys + ["status", "detail"], rows)
    return ExperimentOutcome(
        criteria=[Criterion.at_least("passed_points", passed, len(points))],
        notes=[f"{passed}/{len(points)} points passed"],
    )
