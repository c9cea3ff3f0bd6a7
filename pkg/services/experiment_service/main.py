# main.py - Command-line entry point for the experiment_service
# This file builds the argument parser, configures logging and maps errors to exit codes.

import argparse
import logging
import os
import sys
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

# Add project root to path
project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
sys.path.insert(0, project_root)

from shared.utils.errors import ConfigError, NumericFailure, SizeLimitError
from services.experiment_service.commands import COMMANDS
from services.experiment_service.config import settings
from services.experiment_service.models import ExitCode

logger = logging.getLogger(__name__)

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisy-trotter",
        description="Noisy Trotter simulation, error-model fitting and resource planning",
    )
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default from settings)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.version}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser

def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        force=True,
    )

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return int(args.handler(args))
    except SizeLimitError as e:
        logger.error(f"{args.command}: size limit: {str(e)}")
        return ExitCode.SIZE_LIMIT
    except (ConfigError, ValidationError) as e:
        logger.error(f"{args.command}: invalid configuration: {str(e)}")
        return ExitCode.CONFIG_ERROR
    except NumericFailure as e:
        logger.error(f"{args.command}: numeric failure: {str(e)}")
        return ExitCode.NUMERIC_FAILURE
    except (np.linalg.LinAlgError, ArithmeticError) as e:
        logger.error(f"{args.command}: numeric failure: {type(e).__name__}: {str(e)}")
        return ExitCode.NUMERIC_FAILURE

if __name__ == "__main__":
    sys.exit(main())
