# plan.py - `plan` subcommand
# This file compares the state-dependent and worst-case plans for a fitted
# error model and writes the PlanResult.

import argparse
import logging
from pathlib import Path

from shared.utils.digests import digest_file
from shared.utils.errors import ConfigError
from services.analysis_service.models import ErrorModel, FTParams, WorstCaseInputs
from services.analysis_service.planner import plan_comparison
from ..config import settings
from ..models import ExitCode
from .common import default_output

logger = logging.getLogger(__name__)

def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("plan", help="optimal r, gamma* and surface-code savings for a model")
    parser.add_argument("--model", required=True, help="ErrorModel JSON written by fit")
    parser.add_argument("--epsilon", type=float, required=True, help="target accumulated error")
    parser.add_argument("--time", type=float, required=True, help="evolution time t")
    parser.add_argument("--gamma0", type=float, help="surface-code prefactor")
    parser.add_argument("--ratio", type=float, help="physical-to-threshold rate ratio")
    worst = parser.add_mutually_exclusive_group()
    worst.add_argument("--worst-model", help="ErrorModel JSON for the comparison side")
    worst.add_argument("--b-worst", type=float, help="worst-case Trotter prefactor (default: the model's)")
    parser.add_argument("--out", help="PlanResult JSON output")
    parser.set_defaults(handler=run)

def ft_params_from(args: argparse.Namespace) -> FTParams:
    values = {key: getattr(args, key) for key in ("gamma0", "ratio") if getattr(args, key) is not None}
    return FTParams(**values)

def run(args: argparse.Namespace) -> int:
    model_path = Path(args.model)
    if not model_path.is_file():
        raise ConfigError(f"model file not found: {model_path}")
    model = ErrorModel.load(model_path)
    inputs = {str(model_path): digest_file(model_path)}
    if args.worst_model:
        worst = ErrorModel.load(args.worst_model)
        inputs[args.worst_model] = digest_file(args.worst_model)
    else:
        b_worst = args.b_worst if args.b_worst is not None else model.worst_case_b
        if b_worst is None:
            raise ConfigError("model carries no worst-case prefactor; pass --b-worst or --worst-model")
        worst = WorstCaseInputs(n=model.n, B_worst=b_worst, order=model.order)

    result = plan_comparison(model, worst, args.epsilon, args.time, ft_params_from(args))
    result = result.model_copy(update={"provenance": {"inputs": inputs, "version": settings.version}})
    out = Path(args.out) if args.out else default_output("plan.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    result.save(out)
    summary = result.summary()
    print(
        f"r_opt={summary['r_opt']} gamma*={summary['gamma_star']:.6g} "
        f"worst_r_opt={summary['worst_r_opt']} worst_gamma*={summary['worst_gamma_star']:.6g} "
        f"saving={summary['saving']:.4f}"
    )
    for warning in result.warnings:
        print(f"warning: {warning}")
    return ExitCode.OK
