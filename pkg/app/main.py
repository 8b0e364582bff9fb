"""
Ridepool Service Toolkit
Main Application Entry Point

Builds the command-line application, sets up logging from the effective
configuration and dispatches to the command controllers. Results and errors
are printed to stdout as JSON; logs go to stderr and the log file.

Exit codes: 0 success, 2 input error, 3 solver or internal error.
"""

import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from . import __version__
from .config import apply_overrides, load_config
from .controllers import COMMANDS
from .controllers.context import CommandContext
from .utils.constants import (
    APP_NAME,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_SOLVER_ERROR,
    ErrorCode,
)
from .utils.errors import InputError, RidepoolError
from .utils.logger import logger, setup_logger
from .views.json_view import JsonView


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="run.py", description=APP_NAME)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default="config.yaml", help="YAML configuration file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override a configuration value (repeatable)",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def _fail(code: str, message: str, details: Optional[str], exit_code: int) -> int:
    print(JsonView.dumps(JsonView.error(code, message, details)))
    return exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = create_parser().parse_args(argv)

    try:
        cfg = apply_overrides(load_config(args.config), args.overrides)
    except (ValueError, ValidationError) as e:
        return _fail(ErrorCode.SCHEMA_ERROR, "invalid configuration", str(e), EXIT_INPUT_ERROR)

    setup_logger(
        level=cfg.logging.level,
        log_file=cfg.logging.file,
        max_size=cfg.logging.max_size,
        backup_count=cfg.logging.backup_count,
        console=cfg.logging.console,
        colorize=cfg.logging.colorize,
    )
    ctx = CommandContext(cfg)
    logger.info(f"{APP_NAME} {__version__}: {args.command} (config {ctx.config_hash[:12]})")

    try:
        data = args.handler(args, ctx)
    except InputError as e:
        logger.error(f"{args.command} failed: {e.message}")
        return _fail(e.code, e.message, e.details, EXIT_INPUT_ERROR)
    except RidepoolError as e:
        logger.error(f"{args.command} failed: {e.message}")
        return _fail(e.code, e.message, e.details, EXIT_SOLVER_ERROR)
    except Exception as e:
        logger.exception(f"{args.command} crashed")
        return _fail(ErrorCode.UNKNOWN_ERROR, str(e), type(e).__name__, EXIT_SOLVER_ERROR)

    print(JsonView.dumps(JsonView.success(args.command, data, ctx.config_hash)))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
