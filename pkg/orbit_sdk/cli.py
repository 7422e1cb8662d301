#!/usr/bin/env python3
"""CLI for discovering and running orbitlab experiments.

Exit codes: 0 on success, 1 for invalid configuration or parameters, 2 when an
internal invariant is violated.
"""

import argparse
import importlib
import json
import logging
import sys
import types
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union, get_args, get_origin

from pydantic import ValidationError

from orbit_sdk import EXPERIMENT_REGISTRY, ExperimentFunction, get_registry_output
from orbit_sdk.checkpoint import Checkpoint, active_checkpoint
from orbit_sdk.config import Settings, get_settings, read_pyproject
from orbit_sdk.exceptions import ExperimentError
from orbit_sdk.logger import logger
from orbit_sdk.output import OutputFormat, build_report, render
from orbit_sdk.utils import atomic_write_text
from orbitlab.exceptions import DomainError, InvariantViolation, OrbitLabError, PrecisionError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INVARIANT = 2


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise ExperimentError(f"{self.prog}: {message}")


def discover_experiments(module_paths: list[str]) -> Dict[str, ExperimentFunction]:
    """Import the configured modules so their @experiment functions register."""
    for module_path in module_paths:
        try:
            importlib.import_module(module_path)
        except ImportError as e:
            raise ExperimentError(
                f"Error importing experiment module '{module_path}': {e}. "
                "Install the project (pip install -e .) or add it to PYTHONPATH."
            ) from e
    return EXPERIMENT_REGISTRY


def cmd_check(args: argparse.Namespace) -> int:
    """Handle 'check' command - validate project setup."""
    print("Checking orbitlab project setup...\n")

    errors: list[str] = []
    warnings: list[str] = []

    pyproject_path = Path.cwd() / "pyproject.toml"

    if not pyproject_path.exists():
        errors.append("pyproject.toml not found in current directory")
        print("[FAIL] pyproject.toml exists")
    else:
        print("[OK]   pyproject.toml exists")
        try:
            pyproject = read_pyproject(pyproject_path)
        except ExperimentError as e:
            errors.append(e.message)
            print("[FAIL] pyproject.toml is valid TOML")
            pyproject = None

        if pyproject is not None:
            if "build-system" not in pyproject:
                errors.append("[build-system] section missing from pyproject.toml")
                print("[FAIL] [build-system] section configured")
            else:
                print("[OK]   [build-system] section configured")

            table = pyproject.get("tool", {}).get("orbitlab")
            if table is None:
                warnings.append("[tool.orbitlab] section missing; defaults are used")
                print("[WARN] [tool.orbitlab] section configured")
                table = {}
            try:
                settings = Settings.model_validate(table)
                print("[OK]   [tool.orbitlab] settings are valid")
            except ValidationError as e:
                errors.append(f"Invalid [tool.orbitlab] settings: {e}")
                print("[FAIL] [tool.orbitlab] settings are valid")
                settings = None

            if settings is not None:
                print()
                print("Checking module imports...")
                for module in settings.modules:
                    try:
                        importlib.import_module(module)
                        print(f"[OK]   Can import '{module}'")
                    except ImportError as e:
                        errors.append(f"Cannot import module '{module}': {e}")
                        print(f"[FAIL] Can import '{module}'")

                if EXPERIMENT_REGISTRY:
                    print()
                    print(f"[OK]   Found {len(EXPERIMENT_REGISTRY)} experiment(s):")
                    for name in EXPERIMENT_REGISTRY:
                        print(f"       - {name}")
                else:
                    warnings.append("No experiments registered by the configured modules")
                    print()
                    print("[WARN] No experiments found in registered modules")

    print()
    print("-" * 50)

    if errors:
        print(f"\nFound {len(errors)} error(s):\n")
        for i, error in enumerate(errors, 1):
            print(f"  {i}. {error}\n")
        return EXIT_CONFIG
    if warnings:
        print(f"\nSetup OK with {len(warnings)} warning(s):\n")
        for i, warning in enumerate(warnings, 1):
            print(f"  {i}. {warning}\n")
        return EXIT_OK
    print("\nAll checks passed!")
    return EXIT_OK


def cmd_config_dump(args: argparse.Namespace) -> int:
    """Handle 'config dump' command."""
    dump = json.dumps(
        {"experiments": get_registry_output(), "settings": get_settings().model_dump()},
        indent=2,
    )
    print(dump)
    if args.output_file:
        atomic_write_text(Path(args.output_file), dump + "\n")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    """Handle 'run' command: invoke an experiment with JSON parameters."""
    if args.experiment not in EXPERIMENT_REGISTRY:
        raise ExperimentError(
            f"Experiment '{args.experiment}' not found. "
            f"Available experiments: {', '.join(EXPERIMENT_REGISTRY)}"
        )
    result = EXPERIMENT_REGISTRY[args.experiment].on_invoke(args.input)
    print(result)
    if args.output_file:
        output_path = Path(args.output_file)
        atomic_write_text(output_path, result + "\n")
        print(f"Result written to {output_path}")
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    """Run one experiment subcommand and emit its table."""
    experiment = EXPERIMENT_REGISTRY[args.experiment_name]
    model_fields = experiment.schema.params_pydantic_model.model_fields
    params = {name: value for name, value in vars(args).items() if name in model_fields}
    values = experiment.validate_params(params)
    dumped = experiment.dump_params(values)

    output = Path(args.output_path) if args.output_path else None
    checkpoint: Optional[Checkpoint] = None
    if experiment.experiment_data.sweep and output is not None:
        fingerprint = json.dumps(
            {"experiment": args.experiment_name, "params": dumped}, sort_keys=True
        )
        checkpoint = Checkpoint(output, fingerprint, resume=args.resume)
    elif args.resume:
        logger.warning("--resume only applies to sweep experiments written to --output")

    try:
        with active_checkpoint(checkpoint):
            table = experiment.invoke(values)
    except (OrbitLabError, ExperimentError):
        # Interrupts leave the file in place for --resume.
        if checkpoint is not None:
            checkpoint.discard()
        raise

    report = build_report(args.experiment_name, dumped, table)
    text = render(report, OutputFormat(args.output_format))
    if output is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(output, text)
        print(f"Wrote {len(table.rows)} row(s) to {output}")
    if checkpoint is not None:
        checkpoint.finish()
    return EXIT_OK


def _unwrap_optional(tp: Any) -> Any:
    if get_origin(tp) in (Union, types.UnionType):
        members = [a for a in get_args(tp) if a is not type(None)]
        if len(members) == 1:
            return members[0]
    return tp


def _scalar_type(tp: Any) -> Any:
    return tp if tp in (int, float, str) else str


def add_experiment_arguments(
    parser: argparse.ArgumentParser, experiment: ExperimentFunction
) -> None:
    """Generate flags from the experiment's parameter model."""
    data = experiment.experiment_data
    for name, field in experiment.schema.params_pydantic_model.model_fields.items():
        tp = _unwrap_optional(experiment.schema.param_types[name])
        required = field.is_required()
        help_text = field.description or (None if required else f"default: {field.default}")
        kwargs: dict[str, Any] = {"help": help_text}

        if tp is bool:
            parser.add_argument(
                f"--{name.replace('_', '-')}",
                dest=name,
                action="store_true",
                default=argparse.SUPPRESS,
                help=help_text,
            )
            continue
        if get_origin(tp) in (list, tuple, Sequence):
            kwargs.update(nargs="+", type=_scalar_type(get_args(tp)[0]))
        elif isinstance(tp, type) and issubclass(tp, Enum):
            kwargs.update(type=str, choices=[member.value for member in tp])
        else:
            kwargs.update(type=_scalar_type(tp))

        if name in data.positional_params:
            if not required:
                kwargs.update(nargs="?", default=argparse.SUPPRESS)
            parser.add_argument(name, metavar=data.positional_params[name], **kwargs)
        else:
            parser.add_argument(
                f"--{name.replace('_', '-')}",
                dest=name,
                required=required,
                default=argparse.SUPPRESS,
                **kwargs,
            )


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", dest="output_path", help="Write the table to this file")
    parser.add_argument(
        "--format",
        dest="output_format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.CSV.value,
        help="Output format (default: csv)",
    )
    parser.add_argument(
        "--resume",
        action="store_true",
        help="Reuse finished values from <output>.partial.jsonl",
    )
    parser.add_argument("--verbose", action="store_true", help="Debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="orbitlab", description="Experiments on shearing of divergent diagonal orbits"
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    check_parser = subparsers.add_parser("check", help="Validate project setup")
    check_parser.set_defaults(func=cmd_check)

    config_parser = subparsers.add_parser("config", help="Configuration commands")
    config_subparsers = config_parser.add_subparsers(dest="config_command")
    dump_parser = config_subparsers.add_parser(
        "dump", help="Dump registered experiments and resolved settings as JSON"
    )
    dump_parser.add_argument("--output-file", help="Path to write the JSON dump to")
    dump_parser.set_defaults(func=cmd_config_dump)

    run_parser = subparsers.add_parser("run", help="Run an experiment from JSON parameters")
    run_parser.add_argument("--experiment", required=True, help="Name of the experiment")
    run_parser.add_argument("--input", default="{}", help="JSON object of parameters")
    run_parser.add_argument("--output-file", help="Path to write the JSON result to")
    run_parser.set_defaults(func=cmd_run)

    for name, experiment in EXPERIMENT_REGISTRY.items():
        sub = subparsers.add_parser(
            name,
            help=experiment.experiment_data.description,
            description=experiment.experiment_data.description,
        )
        add_experiment_arguments(sub, experiment)
        _add_common_arguments(sub)
        sub.set_defaults(func=cmd_experiment, experiment_name=name)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    try:
        code = _main(argv)
    except (InvariantViolation, PrecisionError) as e:
        print(f"Invariant violation: {e}", file=sys.stderr)
        code = EXIT_INVARIANT
    except (ExperimentError, DomainError, ValidationError) as e:
        print(f"Error: {e}", file=sys.stderr)
        code = EXIT_CONFIG
    sys.exit(code)


def _main(argv: Optional[Sequence[str]]) -> int:
    settings = get_settings()
    try:
        discover_experiments(settings.modules)
    except ExperimentError as e:
        # 'check' reports import failures itself
        print(f"Warning: {e.message}", file=sys.stderr)

    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    main()
