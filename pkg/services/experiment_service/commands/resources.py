# resources.py - `resources` subcommand
# This file prints the surface-code distance and qubit count for a logical rate.

import argparse
import logging
from pathlib import Path

from services.analysis_service.resources import ft_resources
from ..models import ExitCode
from .common import write_summary
from .plan import ft_params_from

logger = logging.getLogger(__name__)

def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("resources", help="surface-code distance and qubits for a logical rate")
    parser.add_argument("--gamma-l", type=float, required=True, help="required logical error rate")
    parser.add_argument("--gamma0", type=float)
    parser.add_argument("--ratio", type=float)
    parser.add_argument("--out", help="optional JSON summary")
    parser.set_defaults(handler=run)

def run(args: argparse.Namespace) -> int:
    params = ft_params_from(args)
    estimate = ft_resources(args.gamma_l, params)
    if args.out:
        write_summary(Path(args.out), "resources", {}, {}, {**estimate.model_dump(), **params.model_dump()})
    print(f"d_c={estimate.d_c}, N_c={estimate.n_c}")
    return ExitCode.OK
