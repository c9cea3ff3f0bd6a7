# models.py - Experiment configuration and sweep bookkeeping
# This file defines the experiment config accepted by every subcommand, the
# per-cell sweep records, the sweep manifest and the CLI exit codes.

import json
from datetime import datetime
from enum import Enum, IntEnum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from shared.utils.errors import ConfigError
from services.simulation_service.models import Placement

class ExitCode(IntEnum):
    OK = 0
    CONFIG_ERROR = 2
    SIZE_LIMIT = 3
    NUMERIC_FAILURE = 4

class HamiltonianKind(str, Enum):
    TFI = "tfi"
    POWERLAW = "powerlaw"
    FERMI_HUBBARD = "fermi_hubbard"
    FILE = "file"

class NoiseName(str, Enum):
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"
    PAULI = "pauli"
    AMPLITUDE_DAMPING = "amplitude_damping"

class InitialState(str, Enum):
    ZERO = "zero"
    PLUS = "plus"
    GROUND = "ground"
    HAAR = "haar"
    WORST_ONE_STEP = "worst_one_step"

class CellStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"

class HamiltonianConfig(BaseModel):
    kind: HamiltonianKind = HamiltonianKind.TFI
    J: float = 2.0
    h: float = 1.0
    periodic: bool = True
    alpha: float = 4.0
    fields: Optional[List[float]] = None
    v: float = 1.0
    u: float = 4.0
    path: Optional[str] = None

    @model_validator(mode="after")
    def _check_source(self) -> "HamiltonianConfig":
        if self.kind == HamiltonianKind.FILE:
            if not self.path:
                raise ValueError("file Hamiltonian needs 'path'")
            if not Path(self.path).is_file():
                raise ValueError(f"Hamiltonian file not found: {self.path}")
        return self

class ExperimentConfig(BaseModel):
    """One experiment; scalar n/gamma for simulate, grids for sweep.

    `time` defaults to t = n. For fermi_hubbard, n counts qubits (2 per site).
    """
    hamiltonian: HamiltonianConfig = Field(default_factory=HamiltonianConfig)
    n: Optional[int] = Field(default=None, ge=1)
    n_grid: List[int] = Field(default_factory=list)
    order: int = 2
    steps: int = Field(default=100, ge=1)
    time: Optional[float] = Field(default=None, gt=0)
    gamma: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    gamma_grid: List[float] = Field(default_factory=list)
    noise: NoiseName = NoiseName.DEPOLARIZING
    pauli_weights: Optional[Tuple[float, float, float]] = None
    placement: Placement = Placement.PER_STEP
    time_rate: Optional[float] = Field(default=None, ge=0.0)
    initial: InitialState = InitialState.ZERO
    haar_count: int = Field(default=1, ge=1)
    seed: int = 0
    entropy_diagnostics: bool = True
    out: Optional[str] = None
    workers: Optional[int] = Field(default=None, ge=1)

    @field_validator("gamma_grid")
    @classmethod
    def _gammas_in_range(cls, v: List[float]) -> List[float]:
        for gamma in v:
            if not 0.0 <= gamma <= 1.0:
                raise ValueError(f"gamma {gamma} outside [0, 1]")
        return v

    @field_validator("n_grid")
    @classmethod
    def _sizes_positive(cls, v: List[int]) -> List[int]:
        if any(n < 1 for n in v):
            raise ValueError(f"n_grid entries must be positive, got {v}")
        return v

    @field_validator("order")
    @classmethod
    def _valid_order(cls, v: int) -> int:
        if v != 1 and (v < 2 or v % 2):
            raise ValueError(f"order must be 1 or a positive even integer, got {v}")
        return v

    def sizes(self) -> List[int]:
        sizes = self.n_grid or ([self.n] if self.n is not None else [])
        if not sizes and self.hamiltonian.kind != HamiltonianKind.FILE:
            raise ConfigError("set n or n_grid")
        return sizes

    def gammas(self) -> List[float]:
        gammas = self.gamma_grid or ([self.gamma] if self.gamma is not None else [])
        if not gammas:
            raise ConfigError("set gamma or gamma_grid")
        return gammas

    def time_for(self, n: int) -> float:
        return float(n) if self.time is None else self.time

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        return cls.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))

class SweepCell(BaseModel):
    cell_id: str
    n: int
    gamma: float
    status: CellStatus = CellStatus.PENDING
    trace_file: Optional[str] = None
    digest: Optional[str] = None
    accumulated_direct: Optional[float] = None
    accumulated_sum: Optional[float] = None
    worst_case_b: Optional[float] = None
    runtime_seconds: Optional[float] = None
    error_message: Optional[str] = None
    start_time: Optional[datetime] = None
    end_time: Optional[datetime] = None

class SweepManifest(BaseModel):
    version: str
    config: ExperimentConfig
    config_digest: str
    cells: List[SweepCell] = Field(default_factory=list)
    combined_digest: Optional[str] = None

    @property
    def failed_cells(self) -> List[SweepCell]:
        return [cell for cell in self.cells if cell.status != CellStatus.COMPLETED]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SweepManifest":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))

class CommandSummary(BaseModel):
    """Structured record written next to every command output."""
    command: str
    version: str
    outputs: Dict[str, str] = Field(default_factory=dict)     # name -> path
    inputs: Dict[str, str] = Field(default_factory=dict)      # path -> sha256
    results: Dict[str, Any] = Field(default_factory=dict)
