# common.py - Shared flags and config assembly for the subcommands
# This file defines the experiment flags shared by simulate and sweep, merges
# them over an optional JSON config file and writes command summaries.

import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from shared.utils.digests import digest_file
from shared.utils.errors import ConfigError
from ..config import settings
from ..models import CommandSummary, ExperimentConfig, HamiltonianKind
from ..output_store import atomic_write_json

logger = logging.getLogger(__name__)

BUILTIN_HAMILTONIANS = {kind.value for kind in HamiltonianKind if kind != HamiltonianKind.FILE}

def experiment_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("experiment")
    group.add_argument("--config", help="JSON experiment config; flags override its values")
    group.add_argument("--hamiltonian", help="tfi | powerlaw | fermi_hubbard | path to a Hamiltonian JSON file")
    group.add_argument("--coupling", dest="J", type=float, help="TFI coupling J")
    group.add_argument("--field", dest="h", type=float, help="TFI field h")
    group.add_argument("--periodic", action=argparse.BooleanOptionalAction, default=None)
    group.add_argument("--alpha", type=float, help="power-law exponent")
    group.add_argument("--v", type=float, help="Fermi-Hubbard hopping")
    group.add_argument("--u", type=float, help="Fermi-Hubbard interaction")
    group.add_argument("--n", type=int, nargs="+", help="qubit count(s)")
    group.add_argument("--order", type=int, help="product-formula order p")
    group.add_argument("--steps", type=int, help="Trotter number r")
    group.add_argument("--time", type=float, help="evolution time t (default t = n)")
    group.add_argument("--noise", help="depolarizing | dephasing | pauli | amplitude_damping")
    group.add_argument("--pauli-weights", type=float, nargs=3, metavar=("WX", "WY", "WZ"))
    group.add_argument("--gamma", type=float, nargs="+", help="noise rate(s)")
    group.add_argument("--placement", help="per_step | per_layer | per_time")
    group.add_argument("--time-rate", type=float, help="noise rate per unit time for per_time placement")
    group.add_argument("--initial", help="zero | plus | ground | haar | worst_one_step")
    group.add_argument("--haar-count", type=int)
    group.add_argument("--seed", type=int)
    group.add_argument("--out", help="output path")
    group.add_argument("--workers", type=int)
    group.add_argument("--no-entropy", dest="entropy_diagnostics", action="store_false", default=None)
    return parent

def _read_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}")
    if not isinstance(payload, dict):
        raise ConfigError(f"config file {path} must hold an object")
    return payload

def _set_grid(payload: Dict[str, Any], values: Optional[list], scalar: str, grid: str) -> None:
    if values is None:
        return
    if len(values) == 1:
        payload[scalar] = values[0]
        payload[grid] = []
    else:
        payload[grid] = list(values)

def build_experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values overridden by every flag that was given."""
    payload = _read_config_file(args.config)
    hamiltonian = dict(payload.get("hamiltonian", {}))
    if args.hamiltonian is not None:
        if args.hamiltonian in BUILTIN_HAMILTONIANS:
            hamiltonian["kind"] = args.hamiltonian
        else:
            hamiltonian.update(kind=HamiltonianKind.FILE.value, path=args.hamiltonian)
    for field in ("J", "h", "periodic", "alpha", "v", "u"):
        value = getattr(args, field)
        if value is not None:
            hamiltonian[field] = value
    payload["hamiltonian"] = hamiltonian

    _set_grid(payload, args.n, "n", "n_grid")
    _set_grid(payload, args.gamma, "gamma", "gamma_grid")
    for flag, field in (
        ("order", "order"), ("steps", "steps"), ("time", "time"), ("noise", "noise"),
        ("pauli_weights", "pauli_weights"), ("placement", "placement"), ("time_rate", "time_rate"),
        ("initial", "initial"), ("haar_count", "haar_count"), ("seed", "seed"), ("out", "out"),
        ("workers", "workers"), ("entropy_diagnostics", "entropy_diagnostics"),
    ):
        value = getattr(args, flag)
        if value is not None:
            payload[field] = value
    return ExperimentConfig.model_validate(payload)

def input_digests(paths: Iterable[Optional[str]]) -> Dict[str, str]:
    return {str(path): digest_file(path) for path in paths if path}

def write_summary(path: Path, command: str, outputs: Dict[str, str], inputs: Dict[str, str],
                  results: Dict[str, Any]) -> Path:
    summary = CommandSummary(
        command=command, version=settings.version, outputs=outputs, inputs=inputs, results=results,
    )
    return atomic_write_json(path, summary.model_dump())

def default_output(name: str) -> Path:
    return Path(settings.output_dir) / name
