# sweep.py - `sweep` subcommand
# This file runs every (n, γ) cell of a config in parallel and writes one trace
# per cell plus the digest manifest.

import argparse
import asyncio
import logging
from pathlib import Path

from ..models import ExitCode
from ..sweep_engine import MANIFEST_NAME, SweepEngine
from .common import build_experiment_config, default_output, experiment_parent

logger = logging.getLogger(__name__)

def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "sweep", parents=[experiment_parent()], help="run a parallel sweep over gamma and n grids",
    )
    parser.set_defaults(handler=run)

def run(args: argparse.Namespace) -> int:
    config = build_experiment_config(args)
    out_dir = Path(config.out) if config.out else default_output("sweep")
    engine = SweepEngine(workers=config.workers)
    manifest = asyncio.run(engine.run(config, out_dir))
    failed = manifest.failed_cells
    print(f"{len(manifest.cells) - len(failed)}/{len(manifest.cells)} cells completed; manifest {out_dir / MANIFEST_NAME}")
    return ExitCode.NUMERIC_FAILURE if failed else ExitCode.OK
