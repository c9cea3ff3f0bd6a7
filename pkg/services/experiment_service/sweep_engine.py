# sweep_engine.py - Parallel execution engine for (γ, n) sweeps
# This file runs every sweep cell as an asyncio task bounded by a semaphore,
# dispatches the CPU-bound simulation to a process pool and records per-cell
# status, digests and failures in the sweep manifest.

import asyncio
import logging
import os
import time
from concurrent.futures import Executor, ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from shared.utils.digests import combine_digests, digest_bytes, digest_payload
from services.simulation_service.metrics import accumulated_error, average_traces, worst_case_prefactor
from .config import settings
from .experiment_builder import (
    build_experiment_schedule, build_hamiltonian, build_initial_states, build_noise,
)
from .models import CellStatus, ExperimentConfig, SweepCell, SweepManifest
from .output_store import atomic_write_text, trace_file_name

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"

def run_sweep_cell(config_payload: Dict[str, Any], n: Optional[int], gamma: float, trace_path: str) -> Dict[str, Any]:
    """Simulate one cell and write its trace; runs inside a worker process."""
    started = time.perf_counter()
    config = ExperimentConfig.model_validate(config_payload)
    H = build_hamiltonian(config, n)
    schedule = build_experiment_schedule(config, H)
    t = config.time_for(H.n_qubits)
    dt = t / config.steps
    spec = build_noise(config, gamma)
    traces = []
    for label, rho0 in build_initial_states(config, H, schedule, dt):
        _, _, trace = accumulated_error(
            H, schedule, config.steps, t, spec, rho0,
            entropy_diagnostics=config.entropy_diagnostics, initial_label=label, seed=config.seed,
        )
        traces.append(trace)
    trace = average_traces(traces)
    text = trace.to_csv_text(settings.float_format)
    atomic_write_text(trace_path, text)
    return {
        "n": H.n_qubits,
        "digest": digest_bytes(text.encode("utf-8")),
        "accumulated_direct": trace.accumulated_direct,
        "accumulated_sum": trace.accumulated_sum,
        "worst_case_b": worst_case_prefactor(H, config.order, dt),
        "runtime_seconds": time.perf_counter() - started,
    }

class SweepEngine:
    """Runs every (n, γ) cell of a config on a worker pool."""

    def __init__(self, workers: Optional[int] = None, executor: Optional[Executor] = None):
        self.workers = workers or settings.default_workers or os.cpu_count() or 1
        self._executor = executor

    def plan_cells(self, config: ExperimentConfig) -> List[SweepCell]:
        sizes = config.sizes() or [None]
        cells = []
        for n in sizes:
            for gamma in config.gammas():
                key = "file" if n is None else str(n)
                cells.append(SweepCell(cell_id=f"n{key}_g{gamma:.17g}", n=n or 0, gamma=gamma))
        return cells

    async def run(self, config: ExperimentConfig, out_dir: Path) -> SweepManifest:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        cells = self.plan_cells(config)
        payload = config.model_dump(mode="json")
        logger.info(f"Starting sweep of {len(cells)} cells with {self.workers} workers into {out_dir}")

        executor = self._executor or ProcessPoolExecutor(max_workers=self.workers)
        semaphore = asyncio.Semaphore(self.workers)
        try:
            await asyncio.gather(*[
                self._execute_cell(executor, semaphore, payload, cell, out_dir) for cell in cells
            ])
        finally:
            if self._executor is None:
                executor.shutdown(wait=True)

        manifest = SweepManifest(
            version=settings.version,
            config=config,
            config_digest=digest_payload(payload),
            cells=cells,
            combined_digest=combine_digests(f"{cell.cell_id}:{cell.digest}" for cell in cells),
        )
        atomic_write_text(out_dir / MANIFEST_NAME, manifest.to_json())
        failed = manifest.failed_cells
        if failed:
            logger.error(f"Sweep finished with {len(failed)} failed cells: {[cell.cell_id for cell in failed]}")
        else:
            logger.info(f"Sweep completed: {len(cells)} cells, combined digest {manifest.combined_digest[:12]}")
        return manifest

    async def _execute_cell(
        self, executor: Executor, semaphore: asyncio.Semaphore, payload: Dict[str, Any],
        cell: SweepCell, out_dir: Path,
    ) -> None:
        async with semaphore:
            loop = asyncio.get_running_loop()
            cell.status = CellStatus.RUNNING
            cell.start_time = datetime.now(timezone.utc)
            file_name = trace_file_name(cell.n, cell.gamma) if cell.n else f"trace_{cell.cell_id}.csv"
            try:
                result = await loop.run_in_executor(
                    executor, run_sweep_cell, payload, cell.n or None, cell.gamma, str(out_dir / file_name)
                )
                cell.n = result["n"]
                cell.trace_file = file_name
                cell.digest = result["digest"]
                cell.accumulated_direct = result["accumulated_direct"]
                cell.accumulated_sum = result["accumulated_sum"]
                cell.worst_case_b = result["worst_case_b"]
                cell.runtime_seconds = result["runtime_seconds"]
                cell.status = CellStatus.COMPLETED
                logger.info(f"Cell {cell.cell_id} completed in {cell.runtime_seconds:.1f}s")
            except Exception as e:
                logger.error(f"Cell {cell.cell_id} failed: {str(e)}")
                cell.status = CellStatus.FAILED
                cell.error_message = f"{type(e).__name__}: {e}"
            finally:
                cell.end_time = datetime.now(timezone.utc)
