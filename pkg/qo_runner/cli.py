"""
Command-line entry point: python -m qo_runner <config.json> [options]

Exit status: 0 when every scientific pass flag holds, 1 when a flag
fails, 2 on configuration, geometry or I/O errors.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from qo_physics.errors import DelayedChoiceViolationError
from qo_runner.execute import execute
from qo_runner.scenario import apply_overrides, load_config

logger = logging.getLogger("qo_runner")


# -----------------------------
# Defaults
# -----------------------------
OUTPUT_DIR_ENV = "QO_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "output"

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qo_runner",
        description="Delayed-choice complementarity simulator: run one scenario.",
    )
    parser.add_argument("config", type=Path, help="Scenario JSON file.")
    parser.add_argument(
        "--output-dir", type=Path,
        default=Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)),
        help=f"Results directory (default: ${OUTPUT_DIR_ENV} or '{DEFAULT_OUTPUT_DIR}').",
    )
    parser.add_argument("--seed", type=int, default=None, help="Override the run seed.")
    parser.add_argument("--triggers", type=int, default=None,
                        help="Override triggers per phase point / blocked run.")
    parser.add_argument("--workers", type=int, default=1,
                        help="Worker processes for trigger sharding (result unchanged).")
    parser.add_argument("--no-logs", action="store_true",
                        help="Skip writing event-log files.")
    parser.add_argument("--verbosity", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        default="INFO", help="Logging verbosity.")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=args.verbosity,
        format="%(asctime)s [%(levelname)s] [%(name)s] %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    try:
        scenario = apply_overrides(load_config(args.config), seed=args.seed,
                                   triggers=args.triggers)
        manifest = execute(
            scenario,
            args.output_dir,
            workers=args.workers,
            progress=args.verbosity in ("DEBUG", "INFO"),
            persist_logs=not args.no_logs,
        )
    except (ValueError, OSError, DelayedChoiceViolationError) as exc:
        logger.error("%s", exc)
        return EXIT_ERROR

    for flag, ok in sorted(manifest.flags.items()):
        logger.info("%-40s %s", flag, "ok" if ok else "FAIL")
    return EXIT_PASSED if manifest.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
