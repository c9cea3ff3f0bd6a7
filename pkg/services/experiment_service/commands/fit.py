# fit.py - `fit` subcommand
# This file reads a sweep manifest, fits an error model per system size and
# extrapolates the models to a target size.

import argparse
import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, List

import numpy as np

from shared.utils.digests import digest_file
from shared.utils.errors import ConfigError
from services.analysis_service.fitting import extrapolate_in_n, fit_model_coefficients
from services.analysis_service.models import ErrorModel
from services.simulation_service.models import ErrorTrace
from services.simulation_service.trotter import layer_count
from ..models import CellStatus, ExitCode, SweepCell, SweepManifest
from .common import default_output

logger = logging.getLogger(__name__)

def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("fit", help="fit the empirical error model from a sweep manifest")
    parser.add_argument("--manifest", required=True, help="manifest.json written by sweep")
    parser.add_argument("--target-n", type=int, help="extrapolation size (default: largest swept n)")
    parser.add_argument("--no-clamp", dest="clamp_decay", action="store_false", default=None,
                        help="keep fitted mean decay rates instead of c = b = 1/2")
    parser.add_argument("--out", help="ErrorModel JSON output")
    parser.set_defaults(handler=run)

def fit_manifest(manifest_path: Path) -> Dict[int, ErrorModel]:
    """One ErrorModel per swept size, with the mean worst-case prefactor attached."""
    manifest = SweepManifest.load(manifest_path)
    config = manifest.config
    by_size: Dict[int, List[SweepCell]] = defaultdict(list)
    for cell in manifest.cells:
        if cell.status != CellStatus.COMPLETED:
            logger.warning(f"Skipping failed cell {cell.cell_id}: {cell.error_message}")
            continue
        by_size[cell.n].append(cell)
    if not by_size:
        raise ConfigError(f"{manifest_path} has no completed cells")

    models: Dict[int, ErrorModel] = {}
    for n, cells in sorted(by_size.items()):
        cells = sorted(cells, key=lambda cell: cell.gamma)
        paths = [manifest_path.parent / cell.trace_file for cell in cells]
        traces = [ErrorTrace.from_csv(path) for path in paths]
        model = fit_model_coefficients(
            traces, gammas=[cell.gamma for cell in cells], order=config.order,
            upsilon=layer_count(config.order), t=config.time_for(n), n=n,
        )
        worst = [cell.worst_case_b for cell in cells if cell.worst_case_b is not None]
        provenance = model.provenance.model_copy(update={
            "inputs": {str(path): digest_file(path) for path in paths},
        })
        models[n] = model.model_copy(update={
            "worst_case_b": float(np.mean(worst)) if worst else None,
            "provenance": provenance,
        })
    return models

def run(args: argparse.Namespace) -> int:
    manifest_path = Path(args.manifest)
    if not manifest_path.is_file():
        raise ConfigError(f"manifest not found: {manifest_path}")
    models = fit_manifest(manifest_path)
    out = Path(args.out) if args.out else default_output("model.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    for n, model in models.items():
        model.save(out.with_name(f"{out.stem}_n{n}{out.suffix}"))

    target_n = args.target_n or max(models)
    if len(models) == 1:
        (model,) = models.values()
        if args.target_n and args.target_n != model.n:
            raise ConfigError(f"extrapolation to n={args.target_n} needs at least 3 swept sizes")
    else:
        model = extrapolate_in_n(list(models.values()), target_n, clamp_decay=args.clamp_decay)
    model = model.model_copy(update={"provenance": model.provenance.model_copy(update={
        "inputs": {**model.provenance.inputs, str(manifest_path): digest_file(manifest_path)},
    })})
    model.save(out)
    logger.info(f"Error model for n={model.n} written to {out}")
    print(f"C={model.C:.17g} c={model.c:.17g} B={model.B:.17g} b={model.b:.17g} n={model.n}")
    return ExitCode.OK
