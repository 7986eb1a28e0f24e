#!/usr/bin/env python3
"""Script for running RF canceller scenarios.

This script provides the command-line interface of the simulator: run scenario
files or bundled scenarios, list and dump the bundled scenarios, and sweep the
transmit bandwidth of a scenario.

Exit status: 0 on success, 2 for an invalid configuration, 3 when the LMS loop
diverges.

Example usage:
    poetry run python scripts/run_scenario.py list
    poetry run python scripts/run_scenario.py run circulator_20mhz --duration 0.002
    poetry run python scripts/run_scenario.py preset tracking_step --dump > my.json
    poetry run python scripts/run_scenario.py sweep circulator_20mhz --bandwidths 20e6 100e6
"""

import argparse
import sys
from pathlib import Path
from typing import Optional

from pydantic import ValidationError
from survey_assist_utils.logging import get_logger

sys.path.append(str(Path(__file__).resolve().parent.parent))

# pylint: disable=wrong-import-position
from utils.config_utils import (  # noqa: E402
    format_validation_error,
    list_scenarios,
    load_bundled_scenario,
    resolve_scenario,
)
from utils.lms_utils import LmsDivergenceError  # noqa: E402
from utils.scenario_utils import (  # noqa: E402
    output_dir,
    run_many,
    sweep_bandwidths,
    with_overrides,
)

logger = get_logger(__name__, level="INFO")

EXIT_OK = 0
EXIT_INVALID_CONFIG = 2
EXIT_DIVERGED = 3


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with the run/list/preset/sweep subcommands."""
    parser = argparse.ArgumentParser(
        description="Simulate a wideband self-adaptive RF self-interference canceller."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run scenario files or bundled scenario names")
    run.add_argument("configs", nargs="+", help="Scenario JSON paths or bundled names")
    run.add_argument("--seed", type=int, default=None, help="Override the master seed")
    run.add_argument(
        "--out-dir",
        default=None,
        help="Output root (default: $CANCELLER_OUT_DIR or ./outputs)",
    )
    run.add_argument(
        "--duration", type=float, default=None, help="Override the simulated time in s"
    )
    run.add_argument(
        "--jobs", type=int, default=1, help="Scenarios run in parallel processes"
    )

    sub.add_parser("list", help="List the bundled scenarios")

    preset = sub.add_parser("preset", help="Show or dump a bundled scenario")
    preset.add_argument("name", help="Bundled scenario name")
    preset.add_argument(
        "--dump", action="store_true", help="Write the scenario JSON to stdout for editing"
    )

    sweep = sub.add_parser("sweep", help="Sweep the transmit bandwidth of a scenario")
    sweep.add_argument("config", help="Scenario JSON path or bundled name")
    sweep.add_argument(
        "--bandwidths",
        type=float,
        nargs="+",
        required=True,
        help="Transmit bandwidths in Hz",
    )
    sweep.add_argument("--seed", type=int, default=None, help="Override the master seed")
    sweep.add_argument("--out-dir", default=None, help="Output root")
    sweep.add_argument(
        "--duration", type=float, default=None, help="Override the simulated time in s"
    )
    return parser


def _run(args: argparse.Namespace) -> int:
    reports = run_many(
        args.configs,
        jobs=args.jobs,
        out_root=args.out_dir,
        seed=args.seed,
        duration_s=args.duration,
    )
    for report in reports:
        c = report.cancellation
        sys.stdout.write(
            f"{report.name}: intrinsic_db={c.intrinsic_db:.2f} active_db={c.active_db:.2f} "
            f"total_db={c.total_db:.2f} convergence_time_s={report.convergence_time_s} "
            f"-> {output_dir(report.name, args.out_dir)}\n"
        )
    return EXIT_OK


def _list() -> int:
    for name, description in list_scenarios():
        sys.stdout.write(f"{name}\t{description}\n")
    return EXIT_OK


def _preset(args: argparse.Namespace) -> int:
    config = load_bundled_scenario(args.name)
    if args.dump:
        sys.stdout.write(config.model_dump_json(indent=2) + "\n")
    else:
        sys.stdout.write(f"{config.name}\t{config.description}\n")
    return EXIT_OK


def _sweep(args: argparse.Namespace) -> int:
    config = with_overrides(resolve_scenario(args.config), args.seed, args.duration)
    frame = sweep_bandwidths(config, args.bandwidths)
    out_dir = output_dir(config.name, args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sweep.csv"
    frame.to_csv(path, index=False, float_format="%.12g")
    sys.stdout.write(frame.to_string(index=False) + "\n")
    logger.info(f"Wrote bandwidth sweep to {path}")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point for the simulator command line.

    Args:
        argv: Arguments without the program name, defaults to sys.argv.

    Returns:
        int: Process exit status.
    """
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "list":
            return _list()
        if args.command == "preset":
            return _preset(args)
        return _sweep(args)
    except ValidationError as e:
        logger.error(f"Invalid scenario configuration:\n{format_validation_error(e)}")
        sys.stderr.write(format_validation_error(e) + "\n")
        return EXIT_INVALID_CONFIG
    except (FileNotFoundError, KeyError, ValueError) as e:
        logger.error(f"Invalid scenario: {e}")
        sys.stderr.write(f"{e}\n")
        return EXIT_INVALID_CONFIG
    except LmsDivergenceError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
