# phase.py - `phase` subcommand
# This file evaluates the model and worst-case accumulated error on a (γ, r)
# grid and optionally the noise-rate derivative map.

import argparse
import logging
from pathlib import Path

import numpy as np

from shared.utils.errors import ConfigError
from services.analysis_service.models import ErrorModel
from services.analysis_service.planner import derivative_map, phase_diagram
from ..models import ExitCode
from ..output_store import atomic_write_frame
from .common import default_output, input_digests, write_summary

logger = logging.getLogger(__name__)

def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("phase", help="phase diagram of model versus worst-case error")
    parser.add_argument("--model", required=True, help="ErrorModel JSON written by fit")
    parser.add_argument("--time", type=float, required=True)
    parser.add_argument("--gamma-min", type=float, default=1e-5)
    parser.add_argument("--gamma-max", type=float, default=1e-2)
    parser.add_argument("--gamma-points", type=int, default=50, help="log-spaced gamma values")
    parser.add_argument("--r-min", type=int, default=1)
    parser.add_argument("--r-max", type=int, default=1000)
    parser.add_argument("--r-points", type=int, default=50, help="linearly spaced Trotter numbers")
    parser.add_argument("--n-worst", type=int, help="qubits of the worst-case comparator (default: model n)")
    parser.add_argument("--b-worst", type=float, help="worst-case Trotter prefactor (default: the model's)")
    parser.add_argument("--derivative", action="store_true", help="also write the d(error)/d(gamma) map")
    parser.add_argument("--out", help="phase CSV output")
    parser.set_defaults(handler=run)

def r_grid(r_min: int, r_max: int, points: int) -> np.ndarray:
    if not 1 <= r_min <= r_max or points < 1:
        raise ConfigError(f"invalid r grid [{r_min}, {r_max}] with {points} points")
    grid = np.unique(np.round(np.linspace(r_min, r_max, points)).astype(int))
    if len(grid) < points:
        logger.warning(f"r grid collapsed to {len(grid)} distinct values")
    return grid

def gamma_grid(low: float, high: float, points: int) -> np.ndarray:
    if not 0 < low <= high or points < 1:
        raise ConfigError(f"invalid gamma grid [{low}, {high}] with {points} points")
    return np.geomspace(low, high, points)

def run(args: argparse.Namespace) -> int:
    model_path = Path(args.model)
    if not model_path.is_file():
        raise ConfigError(f"model file not found: {model_path}")
    model = ErrorModel.load(model_path)
    gammas = gamma_grid(args.gamma_min, args.gamma_max, args.gamma_points)
    rs = r_grid(args.r_min, args.r_max, args.r_points)

    frame = phase_diagram(model, gammas, rs, args.time, n=args.n_worst, B_worst=args.b_worst)
    out = Path(args.out) if args.out else default_output("phase.csv")
    atomic_write_frame(out, frame)
    outputs = {"phase": str(out)}
    if args.derivative:
        derivative_path = out.with_name(f"{out.stem}_derivative{out.suffix}")
        atomic_write_frame(derivative_path, derivative_map(model, gammas, rs, args.time))
        outputs["derivative"] = str(derivative_path)
    write_summary(
        out.with_suffix(".summary.json"), "phase", outputs, input_digests([args.model]),
        {"rows": len(frame), "gamma_points": len(gammas), "r_points": len(rs)},
    )
    logger.info(f"Phase diagram with {len(frame)} cells written to {out}")
    print(f"{len(frame)} rows written to {out}")
    return ExitCode.OK
