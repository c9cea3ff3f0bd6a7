# test_cli.py - Subcommands, config merging and the sweep engine
import asyncio
import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
import pytest

from shared.utils.digests import combine_digests, digest_file
from services.analysis_service.models import ErrorModel
from services.analysis_service.planner import gamma_star
from services.experiment_service.commands import resources as resources_command
from services.experiment_service.commands.common import build_experiment_config
from services.experiment_service.main import build_parser, main
from services.experiment_service.models import CellStatus, ExitCode, ExperimentConfig, SweepManifest
from services.experiment_service.sweep_engine import MANIFEST_NAME, SweepEngine
from services.simulation_service.models import ErrorTrace


def write_model(path, **overrides):
    values = dict(C=5.0, c=0.5, B=1.0, b=0.5, order=2, upsilon=4, n=10, worst_case_b=1.0)
    values.update(overrides)
    model = ErrorModel(**values)
    model.save(path)
    return model


class TestResources:
    def test_prints_distance_and_qubits(self, capsys):
        assert main(["resources", "--gamma-l", "4.05e-6"]) == ExitCode.OK
        assert "d_c=27, N_c=729" in capsys.readouterr().out

    def test_rate_above_prefactor_is_config_error(self):
        assert main(["resources", "--gamma-l", "0.5"]) == ExitCode.CONFIG_ERROR

    def test_linear_algebra_failure_is_numeric_exit(self, monkeypatch):
        def broken(*args, **kwargs):
            raise np.linalg.LinAlgError("eigenvalues did not converge")

        monkeypatch.setattr(resources_command, "ft_resources", broken)
        assert main(["resources", "--gamma-l", "4.05e-6"]) == ExitCode.NUMERIC_FAILURE

    def test_writes_summary(self, tmp_path):
        out = tmp_path / "resources.json"
        assert main(["resources", "--gamma-l", "4.05e-6", "--out", str(out)]) == ExitCode.OK
        summary = json.loads(out.read_text())
        assert summary["command"] == "resources"
        assert summary["results"]["d_c"] == 27


class TestSimulate:
    ARGS = ["simulate", "--n", "2", "--steps", "5", "--order", "2"]

    def test_writes_trace_and_summary(self, tmp_path, capsys):
        out = tmp_path / "trace.csv"
        assert main(self.ARGS + ["--gamma", "0.01", "--out", str(out)]) == ExitCode.OK
        assert "accumulated_direct=" in capsys.readouterr().out

        lines = out.read_text().splitlines()
        assert lines[0] == "step,phys_err,alg_err,tot_err,entropy_ratio,rel_entropy"
        assert len(lines) == 1 + 5 + 1
        assert lines[-1].startswith("acc_direct,")

        summary = json.loads(out.with_suffix(".summary.json").read_text())
        assert summary["command"] == "simulate"
        assert summary["results"]["steps"] == 5
        assert summary["results"]["trace_digest"] == digest_file(out)

        trace = ErrorTrace.from_csv(out)
        assert trace.steps == 5
        assert trace.accumulated_direct == pytest.approx(summary["results"]["accumulated_direct"])

    def test_rerun_is_byte_identical(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (first, second):
            assert main(self.ARGS + ["--gamma", "0.02", "--out", str(out)]) == ExitCode.OK
        assert first.read_bytes() == second.read_bytes()

    def test_noiseless_run_has_no_physical_error(self, tmp_path):
        out = tmp_path / "trace.csv"
        assert main(self.ARGS + ["--gamma", "0", "--out", str(out)]) == ExitCode.OK
        trace = ErrorTrace.from_csv(out)
        assert max(trace.series("phys_err")) == pytest.approx(0.0, abs=1e-12)

    def test_too_many_qubits(self, tmp_path):
        out = tmp_path / "trace.csv"
        assert main(["simulate", "--n", "13", "--gamma", "0.01", "--out", str(out)]) == ExitCode.SIZE_LIMIT
        assert not out.exists()

    def test_odd_order_is_rejected(self, tmp_path):
        args = ["simulate", "--n", "2", "--order", "3", "--gamma", "0.01", "--out", str(tmp_path / "t.csv")]
        assert main(args) == ExitCode.CONFIG_ERROR

    def test_grid_is_rejected(self, tmp_path):
        args = self.ARGS + ["--gamma", "0.01", "0.02", "--out", str(tmp_path / "t.csv")]
        assert main(args) == ExitCode.CONFIG_ERROR

    def test_missing_config_file(self, tmp_path):
        args = ["simulate", "--config", str(tmp_path / "missing.json")]
        assert main(args) == ExitCode.CONFIG_ERROR


class TestConfigMerging:
    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps({
            "hamiltonian": {"kind": "tfi", "J": 1.0, "h": 3.0},
            "n": 3, "gamma": 0.01, "steps": 50, "noise": "dephasing",
        }))
        args = build_parser().parse_args([
            "simulate", "--config", str(path), "--steps", "10", "--field", "0.5", "--gamma", "0.02", "0.03",
        ])
        config = build_experiment_config(args)
        assert config.hamiltonian.J == 1.0
        assert config.hamiltonian.h == 0.5
        assert config.steps == 10
        assert config.noise.value == "dephasing"
        assert config.sizes() == [3]
        assert config.gammas() == [0.02, 0.03]

    def test_defaults(self):
        config = build_experiment_config(build_parser().parse_args(["simulate", "--n", "4", "--gamma", "0.1"]))
        assert (config.hamiltonian.J, config.hamiltonian.h, config.hamiltonian.periodic) == (2.0, 1.0, True)
        assert config.order == 2 and config.steps == 100
        assert config.time_for(4) == 4.0

    def test_hamiltonian_path_selects_file_kind(self, tmp_path):
        path = tmp_path / "h.json"
        path.write_text("{}")
        args = build_parser().parse_args(["simulate", "--hamiltonian", str(path), "--gamma", "0.1"])
        config = build_experiment_config(args)
        assert config.hamiltonian.kind.value == "file"
        assert config.sizes() == []


class TestSweepEngine:
    def test_parallel_sweep_writes_cells_and_manifest(self, tmp_path):
        config = ExperimentConfig(n_grid=[2, 3, 4], gamma_grid=[0.01, 0.02, 0.03], steps=20)
        with ThreadPoolExecutor(max_workers=3) as executor:
            manifest = asyncio.run(SweepEngine(workers=3, executor=executor).run(config, tmp_path))

        assert len(manifest.cells) == 9
        assert not manifest.failed_cells
        for cell in manifest.cells:
            path = tmp_path / cell.trace_file
            assert path.name == f"trace_n{cell.n}_g{cell.gamma:.17g}.csv"
            assert digest_file(path) == cell.digest
            assert ErrorTrace.from_csv(path).steps == 20
            assert cell.worst_case_b is not None and cell.worst_case_b > 0
            assert cell.start_time.tzinfo is not None
            assert cell.end_time >= cell.start_time

        expected = combine_digests(f"{cell.cell_id}:{cell.digest}" for cell in manifest.cells)
        assert manifest.combined_digest == expected
        assert SweepManifest.load(tmp_path / MANIFEST_NAME).combined_digest == expected

    def test_reruns_reproduce_digest(self, tmp_path):
        config = ExperimentConfig(n_grid=[2, 3], gamma_grid=[0.01, 0.05], steps=10)
        digests = []
        for run in ("a", "b"):
            with ThreadPoolExecutor(max_workers=2) as executor:
                manifest = asyncio.run(SweepEngine(workers=2, executor=executor).run(config, tmp_path / run))
            digests.append(manifest.combined_digest)
        assert digests[0] == digests[1]

    def test_failed_cell_is_recorded(self, tmp_path):
        config = ExperimentConfig(n_grid=[2, 13], gamma_grid=[0.01], steps=5)
        with ThreadPoolExecutor(max_workers=2) as executor:
            manifest = asyncio.run(SweepEngine(workers=2, executor=executor).run(config, tmp_path))
        (failed,) = manifest.failed_cells
        assert failed.n == 13
        assert failed.status == CellStatus.FAILED
        assert "SizeLimitError" in failed.error_message

    def test_plan_cells(self):
        config = ExperimentConfig(n_grid=[2, 4], gamma_grid=[0.1, 0.2, 0.3])
        cells = SweepEngine(workers=1).plan_cells(config)
        assert [(cell.n, cell.gamma) for cell in cells] == [
            (2, 0.1), (2, 0.2), (2, 0.3), (4, 0.1), (4, 0.2), (4, 0.3),
        ]


class TestSweepAndFit:
    def test_sweep_then_fit(self, tmp_path, capsys):
        sweep_dir = tmp_path / "sweep"
        args = [
            "sweep", "--n", "3", "4", "5", "--gamma", "0.01", "0.02", "0.04",
            "--steps", "20", "--workers", "2", "--out", str(sweep_dir),
        ]
        assert main(args) == ExitCode.OK
        assert "9/9 cells completed" in capsys.readouterr().out

        model_path = tmp_path / "model.json"
        args = ["fit", "--manifest", str(sweep_dir / MANIFEST_NAME), "--out", str(model_path)]
        assert main(args) == ExitCode.OK
        model = ErrorModel.load(model_path)
        assert model.n == 5 and model.order == 2 and model.upsilon == 4
        assert model.provenance.source_sizes == [3, 4, 5]
        assert str(sweep_dir / MANIFEST_NAME) in model.provenance.inputs
        for n in (3, 4, 5):
            assert ErrorModel.load(tmp_path / f"model_n{n}.json").n == n

    def test_missing_manifest(self, tmp_path):
        assert main(["fit", "--manifest", str(tmp_path / "none.json")]) == ExitCode.CONFIG_ERROR


class TestPlanAndPhase:
    def test_plan_matches_gamma_star(self, tmp_path, capsys):
        model = write_model(tmp_path / "model.json")
        out = tmp_path / "plan.json"
        args = ["plan", "--model", str(tmp_path / "model.json"), "--epsilon", "0.1", "--time", "10", "--out", str(out)]
        assert main(args) == ExitCode.OK
        assert "saving=" in capsys.readouterr().out
        payload = json.loads(out.read_text())
        _, searched = gamma_star(model, 0.1, 10.0)
        assert payload["summary"]["gamma_star"] == pytest.approx(searched)
        assert payload["state_dependent"]["gamma_star"] == pytest.approx(searched)

    def test_plan_needs_worst_case_prefactor(self, tmp_path):
        write_model(tmp_path / "model.json", worst_case_b=None)
        args = ["plan", "--model", str(tmp_path / "model.json"), "--epsilon", "0.1", "--time", "10",
                "--out", str(tmp_path / "plan.json")]
        assert main(args) == ExitCode.CONFIG_ERROR
        assert main(args + ["--b-worst", "1.0"]) == ExitCode.OK

    def test_phase_grid(self, tmp_path, capsys):
        write_model(tmp_path / "model.json")
        out = tmp_path / "phase.csv"
        args = ["phase", "--model", str(tmp_path / "model.json"), "--time", "10", "--out", str(out), "--derivative"]
        assert main(args) == ExitCode.OK
        assert "2500 rows written" in capsys.readouterr().out
        assert len(pd.read_csv(out)) == 2500
        assert len(pd.read_csv(tmp_path / "phase_derivative.csv")) == 2500
        summary = json.loads(out.with_suffix(".summary.json").read_text())
        assert summary["results"]["rows"] == 2500

    def test_phase_rejects_empty_gamma_range(self, tmp_path):
        write_model(tmp_path / "model.json")
        args = ["phase", "--model", str(tmp_path / "model.json"), "--time", "10",
                "--gamma-min", "0.1", "--gamma-max", "0.01", "--out", str(tmp_path / "phase.csv")]
        assert main(args) == ExitCode.CONFIG_ERROR
