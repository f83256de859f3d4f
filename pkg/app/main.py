import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

# Cargar variables de entorno
load_dotenv()

from app.core import LabException, settings
from app.models import (
    DatumSection,
    ExperimentSection,
    GridSection,
    ModelSection,
    RunStatus,
    StepSection,
    SweepSection
)

logger = logging.getLogger("app.main")

SECTIONS = {
    "grid": GridSection,
    "model": ModelSection,
    "step": StepSection,
    "datum": DatumSection,
    "experiment": ExperimentSection,
    "sweep": SweepSection,
}


def describe_config_keys() -> str:
    """Help epilog: every config key with its default"""
    lines = ["config keys (TOML sections):"]
    for section, model in SECTIONS.items():
        lines.append(f"  [{section}]")
        for name, field in model.model_fields.items():
            default = "required" if field.is_required() else repr(field.get_default(call_default_factory=True))
            text = f"    {name} = {default}"
            if field.description:
                text += f"  # {field.description}"
            lines.append(text)
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    from app.api import lab

    parser = argparse.ArgumentParser(
        prog="gdnls-lab",
        description=f"{settings.APP_NAME} {settings.APP_VERSION}: config-driven gDNLS/DNLSb experiments",
        epilog=describe_config_keys(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "command",
        choices=sorted(lab.commands),
        help="; ".join(f"{name}: {command.summary}" for name, command in sorted(lab.commands.items())),
    )
    parser.add_argument("--config", required=True, help="TOML experiment file")
    parser.add_argument("--out", default=None, help=f"output root (default {settings.OUT}, env GDNLS_LAB_OUT)")
    parser.add_argument("--jobs", type=int, default=settings.DEFAULT_JOBS, help="worker processes for sweeps")
    parser.add_argument("--seed", type=int, default=None, help="override datum and experiment seeds")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    gdnls-lab entry point

    Returns:
        0 if every criterion passed, 1 on a failed criterion or a lab error,
        2 on an unexpected exception
    """
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    from app.api import lab
    from app.api.deps import load_config

    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = config.with_seed(args.seed)
        manifest = lab.execute(args.command, config, args.out or settings.OUT, args.jobs)
    except LabException as exc:
        logger.error(exc.detail)
        return 1
    except Exception:
        logger.exception(f"{args.command}: unexpected failure")
        return 2
    return 0 if manifest.status == RunStatus.PASSED else 1


if __name__ == "__main__":
    sys.exit(main())
