# simulate.py - `simulate` subcommand
# This file runs one noisy Trotter simulation and writes its error trace CSV
# and a JSON summary next to it.

import argparse
import logging
import time
from pathlib import Path

from shared.utils.digests import digest_bytes, digest_payload
from shared.utils.errors import ConfigError
from services.simulation_service.metrics import accumulated_error, average_traces
from ..config import settings
from ..experiment_builder import build_experiment_schedule, build_hamiltonian, build_initial_states, build_noise
from ..models import ExitCode
from ..output_store import atomic_write_text
from .common import build_experiment_config, default_output, experiment_parent, input_digests, write_summary

logger = logging.getLogger(__name__)

def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "simulate", parents=[experiment_parent()], help="run one noisy Trotter simulation",
    )
    parser.set_defaults(handler=run)

def run(args: argparse.Namespace) -> int:
    config = build_experiment_config(args)
    sizes, gammas = config.sizes(), config.gammas()
    if len(sizes) > 1 or len(gammas) > 1:
        raise ConfigError("simulate takes a single n and gamma; use sweep for grids")
    started = time.perf_counter()
    H = build_hamiltonian(config, sizes[0] if sizes else None)
    schedule = build_experiment_schedule(config, H)
    t = config.time_for(H.n_qubits)
    spec = build_noise(config, gammas[0])
    states = build_initial_states(config, H, schedule, t / config.steps)

    out = Path(config.out) if config.out else default_output("trace.csv")
    outputs = {}
    traces = []
    for label, rho0 in states:
        _, _, trace = accumulated_error(
            H, schedule, config.steps, t, spec, rho0,
            entropy_diagnostics=config.entropy_diagnostics, initial_label=label, seed=config.seed,
        )
        traces.append(trace)
        if len(states) > 1:
            path = out.with_name(f"{out.stem}_{label}{out.suffix}")
            atomic_write_text(path, trace.to_csv_text(settings.float_format))
            outputs[label] = str(path)
    trace = average_traces(traces)
    text = trace.to_csv_text(settings.float_format)
    atomic_write_text(out, text)
    outputs["trace"] = str(out)

    runtime = time.perf_counter() - started
    results = {
        "accumulated_direct": trace.accumulated_direct,
        "accumulated_sum": trace.accumulated_sum,
        "steps": trace.steps,
        "runtime_seconds": runtime,
        "trace_digest": digest_bytes(text.encode("utf-8")),
        "config_digest": digest_payload(config.model_dump(mode="json")),
    }
    inputs = input_digests([args.config, config.hamiltonian.path])
    write_summary(out.with_suffix(".summary.json"), "simulate", outputs, inputs, results)
    logger.info(f"Simulation finished in {runtime:.1f}s: direct={trace.accumulated_direct:.6e}, sum={trace.accumulated_sum:.6e}")
    print(f"accumulated_direct={trace.accumulated_direct:.17g} accumulated_sum={trace.accumulated_sum:.17g}")
    return ExitCode.OK
