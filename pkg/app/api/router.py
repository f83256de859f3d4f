import logging
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict

from app.core import LabException, ParameterError, ResourceError, settings
from app.db import RunStore
from app.models import Criterion, ExperimentOutcome, LabConfig, RunManifest, RunStatus

logger = logging.getLogger(__name__)


class RunContext(BaseModel):
    """What a command handler receives besides its config"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    store: RunStore
    jobs: int = 1


Handler = Callable[[LabConfig, RunContext], ExperimentOutcome]


class Command(BaseModel):
    name: str
    summary: str
    tags: List[str]
    handler: Handler


class CommandRouter:
    """
    Groups experiment commands the way an HTTP router groups endpoints

    Args:
        prefix: Joined to each command name with a dash
        tags: Labels shown in the CLI help
    """

    def __init__(self, prefix: str = "", tags: Optional[List[str]] = None):
        self.prefix = prefix
        self.tags = tags or []
        self.commands: Dict[str, Command] = {}

    def command(self, name: str = "", summary: str = ""):
        full = "-".join(part for part in (self.prefix, name) if part)

        def register(handler: Handler) -> Handler:
            text = summary or (handler.__doc__ or "").strip().splitlines()[0]
            self.commands[full] = Command(name=full, summary=text, tags=self.tags, handler=handler)
            return handler

        return register


class Lab:
    """Registry of every command plus the run harness"""

    def __init__(self):
        self.commands: Dict[str, Command] = {}

    def include_router(self, router: CommandRouter) -> None:
        for name, command in router.commands.items():
            if name in self.commands:
                raise ParameterError(f"command '{name}' registered twice")
            self.commands[name] = command

    def get(self, name: str) -> Command:
        if name not in self.commands:
            raise ParameterError(f"unknown command '{name}'")
        return self.commands[name]

    def execute(
        self,
        name: str,
        config: LabConfig,
        root: Union[str, Path, None] = None,
        jobs: int = 1,
    ) -> RunManifest:
        """
        Run one command: manifest first, compute, tables, final manifest

        LabException ends the run with status `error`; anything else is recorded
        and re-raised.

        Raises:
            ResourceError: If jobs is outside [1, MAX_JOBS]
        """
        command = self.get(name)
        if jobs < 1 or jobs > settings.MAX_JOBS:
            raise ResourceError(f"--jobs {jobs} outside [1, {settings.MAX_JOBS}]")
        store = RunStore.open(name, config, root)
        manifest = RunManifest(
            schema_version=settings.MANIFEST_SCHEMA,
            experiment=name,
            config=config.model_dump(mode="json"),
            code_version=settings.APP_VERSION,
            started_at=datetime.now(timezone.utc),
        )
        store.write_manifest(manifest)
        logger.info(f"{name}: started ({store.digest[:12]})")
        clock = time.perf_counter()
        try:
            outcome = command.handler(config, RunContext(store=store, jobs=jobs))
            manifest.criteria = outcome.criteria
            manifest.notes = outcome.notes
            manifest.status = RunStatus.PASSED if outcome.passed else RunStatus.FAILED
        except LabException as exc:
            logger.error(f"{name}: {exc}")
            manifest.status = RunStatus.ERROR
            manifest.error = str(exc)
        except Exception as exc:
            manifest.status = RunStatus.ERROR
            manifest.error = f"unexpected: {exc!r}"
            self._finish(store, manifest, clock)
            raise
        self._finish(store, manifest, clock)
        for criterion in manifest.criteria:
            level = logging.INFO if criterion.passed else logging.WARNING
            logger.log(
                level,
                f"{name}: {criterion.name} = {criterion.value:.6g} {criterion.comparison} {criterion.threshold:.6g} "
                f"-> {'pass' if criterion.passed else 'FAIL'}",
            )
        logger.info(f"{name}: {manifest.status.value} in {manifest.wall_clock_s:.2f}s")
        return manifest

    @staticmethod
    def _finish(store: RunStore, manifest: RunManifest, clock: float) -> None:
        manifest.finished_at = datetime.now(timezone.utc)
        manifest.wall_clock_s = time.perf_counter() - clock
        store.write_table("summary.csv", ["criterion", "value", "comparison", "threshold", "passed"], [
            (c.name, c.value, c.comparison, c.threshold, c.passed) for c in manifest.criteria
        ] + [("status", manifest.status.value, "", "", manifest.status == RunStatus.PASSED)])
        store.write_manifest(manifest)


def summarize(criteria: List[Criterion]) -> str:
    failed = [c.name for c in criteria if not c.passed]
    return "pass" if not failed else "fail: " + ", ".join(failed)
