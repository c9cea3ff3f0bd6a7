# models.py - Domain records for the dense noisy-Trotter simulator
# This file defines Pauli strings, grouped Hamiltonians, density matrices,
# product-formula schedules, noise specifications and error traces.

import io
import math
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from .config import settings

PAULI_LETTERS = "IXYZ"

class NoiseKind(str, Enum):
    PAULI = "pauli"
    AMPLITUDE_DAMPING = "amplitude_damping"

class Placement(str, Enum):
    PER_STEP = "per_step"
    PER_LAYER = "per_layer"
    PER_TIME = "per_time"

class PauliString(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(gt=0)
    letters: str
    coefficient: float

    @field_validator("letters")
    @classmethod
    def _letters_are_pauli(cls, value: str) -> str:
        value = value.upper()
        bad = set(value) - set(PAULI_LETTERS)
        if bad:
            raise ValueError(f"invalid Pauli letters {sorted(bad)} in '{value}'")
        return value

    @model_validator(mode="after")
    def _check_length(self) -> "PauliString":
        if len(self.letters) != self.n_qubits:
            raise ValueError(
                f"letter-length mismatch: '{self.letters}' has {len(self.letters)} letters, expected {self.n_qubits}"
            )
        if not math.isfinite(self.coefficient):
            raise ValueError(f"coefficient of '{self.letters}' is not finite")
        return self

    @classmethod
    def from_letters(cls, letters: str, coefficient: float) -> "PauliString":
        return cls(n_qubits=len(letters), letters=letters, coefficient=coefficient)

    @classmethod
    def on_sites(cls, n_qubits: int, sites: Dict[int, str], coefficient: float) -> "PauliString":
        """Build a string that is the identity away from `sites` (site -> letter)."""
        letters = ["I"] * n_qubits
        for site, letter in sites.items():
            letters[site] = letter
        return cls(n_qubits=n_qubits, letters="".join(letters), coefficient=coefficient)

    def commutes_with(self, other: "PauliString") -> bool:
        """Pauli strings commute iff they anticommute on an even number of sites."""
        clashes = sum(
            1 for a, b in zip(self.letters, other.letters)
            if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

class GroupedHamiltonian(BaseModel):
    """H = sum_l H_l with every H_l a sum of mutually commuting Pauli strings."""

    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(gt=0)
    groups: List[List[PauliString]]
    label: str = "hamiltonian"

    # dense caches, filled lazily by hamiltonians.py
    _group_matrices: Dict[int, np.ndarray] = PrivateAttr(default_factory=dict)
    _group_spectra: Dict[int, Tuple[np.ndarray, np.ndarray]] = PrivateAttr(default_factory=dict)
    _matrix: Optional[np.ndarray] = PrivateAttr(default=None)
    _spectrum: Optional[Tuple[np.ndarray, np.ndarray]] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_groups(self) -> "GroupedHamiltonian":
        for l, group in enumerate(self.groups):
            for term in group:
                if term.n_qubits != self.n_qubits:
                    raise ValueError(
                        f"letter-length mismatch in group {l}: '{term.letters}' for {self.n_qubits} qubits"
                    )
        if self.n_qubits <= settings.max_validation_qubits:
            for l, group in enumerate(self.groups):
                for a in range(len(group)):
                    for b in range(a + 1, len(group)):
                        if not group[a].commutes_with(group[b]):
                            raise ValueError(
                                f"non-commuting group {l}: '{group[a].letters}' and '{group[b].letters}'"
                            )
        return self

    @property
    def num_groups(self) -> int:
        return len(self.groups)

    @property
    def num_terms(self) -> int:
        return sum(len(group) for group in self.groups)

    def to_payload(self) -> Dict:
        return {
            "n_qubits": self.n_qubits,
            "label": self.label,
            "groups": [
                [{"pauli": term.letters, "coeff": term.coefficient} for term in group]
                for group in self.groups
            ],
        }

class DensityMatrix(BaseModel):
    """Immutable n-qubit state; qubit 0 is the most significant index bit."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_qubits: int = Field(ge=0)
    matrix: np.ndarray

    @model_validator(mode="after")
    def _check_state(self) -> "DensityMatrix":
        dim = 2 ** self.n_qubits
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (dim, dim):
            raise ValueError(f"density matrix shape {matrix.shape} does not match {self.n_qubits} qubits")
        trace = np.trace(matrix)
        if abs(trace - 1.0) > settings.state_tol:
            raise ValueError(f"density matrix trace {trace} differs from 1")
        if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > settings.state_tol:
            raise ValueError("density matrix is not Hermitian")
        if self.n_qubits <= settings.max_psd_check_qubits:
            lowest = float(np.linalg.eigvalsh((matrix + matrix.conj().T) / 2.0)[0])
            if lowest < -settings.state_tol:
                raise ValueError(f"density matrix is not positive semidefinite: eigenvalue {lowest:.3e}")
        view = matrix.view()
        view.setflags(write=False)
        object.__setattr__(self, "matrix", view)
        return self

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def is_valid(self, tol: Optional[float] = None) -> bool:
        tol = settings.state_tol if tol is None else tol
        return self.min_eigenvalue() >= -tol

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

class Schedule(BaseModel):
    """Ordered (group index, fraction of dt) pairs of one product-formula step."""

    model_config = ConfigDict(frozen=True)

    order: int
    entries: List[Tuple[int, float]]
    layer_count: int = Field(gt=0)

    def group_totals(self) -> Dict[int, float]:
        totals: Dict[int, float] = {}
        for group, coefficient in self.entries:
            totals[group] = totals.get(group, 0.0) + coefficient
        return totals

    @property
    def group_indices(self) -> List[int]:
        return [group for group, _ in self.entries]

class NoiseSpec(BaseModel):
    """Local noise applied after every Trotter step (or layer, or per unit time).

    Pauli channels store a base rate gamma split over X, Y, Z by `pauli_weights`;
    depolarizing is the even split, dephasing puts all weight on Z.
    """

    model_config = ConfigDict(frozen=True)

    kind: NoiseKind = NoiseKind.PAULI
    gamma: float = Field(default=0.0, ge=0.0, le=1.0)
    pauli_weights: Tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    placement: Placement = Placement.PER_STEP
    time_rate: Optional[float] = Field(default=None, ge=0.0)
    label: str = "depolarizing"

    @model_validator(mode="after")
    def _check_spec(self) -> "NoiseSpec":
        if any(w < 0 for w in self.pauli_weights):
            raise ValueError(f"negative Pauli weight in {self.pauli_weights}")
        if abs(sum(self.pauli_weights) - 1.0) > 1e-12:
            raise ValueError(f"Pauli weights {self.pauli_weights} must sum to 1")
        if self.placement == Placement.PER_TIME and self.time_rate is None:
            raise ValueError("per_time placement requires time_rate")
        return self

    @classmethod
    def depolarizing(cls, gamma: float, **kwargs) -> "NoiseSpec":
        return cls(gamma=gamma, label="depolarizing", **kwargs)

    @classmethod
    def dephasing(cls, gamma: float, **kwargs) -> "NoiseSpec":
        return cls(gamma=gamma, pauli_weights=(0.0, 0.0, 1.0), label="dephasing", **kwargs)

    @classmethod
    def pauli(cls, gx: float, gy: float, gz: float, **kwargs) -> "NoiseSpec":
        total = gx + gy + gz
        weights = (1 / 3, 1 / 3, 1 / 3) if total == 0 else (gx / total, gy / total, gz / total)
        return cls(gamma=total, pauli_weights=weights, label="pauli", **kwargs)

    @classmethod
    def amplitude_damping(cls, gamma: float, **kwargs) -> "NoiseSpec":
        return cls(kind=NoiseKind.AMPLITUDE_DAMPING, gamma=gamma, label="amplitude_damping", **kwargs)

    def with_gamma(self, gamma: float) -> "NoiseSpec":
        return type(self).model_validate({**self.model_dump(), "gamma": gamma})

    def pauli_rates(self, gamma: Optional[float] = None) -> Tuple[float, float, float]:
        gamma = self.gamma if gamma is None else gamma
        wx, wy, wz = self.pauli_weights
        return gamma * wx, gamma * wy, gamma * wz

    @property
    def is_unital(self) -> bool:
        return self.kind == NoiseKind.PAULI

    def layer_rates(self, layer_count: int, dt: float) -> List[float]:
        """Noise rate of each noise layer applied in one Trotter step."""
        if self.placement == Placement.PER_STEP:
            return [self.gamma]
        if self.placement == Placement.PER_LAYER:
            return [self.gamma] * layer_count
        rate = self.time_rate * dt
        if rate > 1.0:
            raise ValueError(f"per_time rate {self.time_rate} x dt {dt} exceeds probability 1")
        return [rate]

class TrajectoryConfig(BaseModel):
    hamiltonian_label: str
    order: int
    steps: int
    time: float
    noise: NoiseSpec
    initial_label: str = "custom"
    seed: Optional[int] = None

class Trajectory(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    states: Optional[List[DensityMatrix]] = None
    final_state: DensityMatrix
    config: TrajectoryConfig

class StepErrorRecord(BaseModel):
    step: int
    phys_err: float
    alg_err: float
    tot_err: float
    entropy_ratio: float = float("nan")
    rel_entropy: float = float("nan")

TRACE_COLUMNS = ["step", "phys_err", "alg_err", "tot_err", "entropy_ratio", "rel_entropy"]

class ErrorTrace(BaseModel):
    records: List[StepErrorRecord] = Field(default_factory=list)
    accumulated_direct: float = float("nan")
    accumulated_sum: float = float("nan")
    config: Optional[TrajectoryConfig] = None

    @property
    def steps(self) -> int:
        return len(self.records)

    def series(self, column: str) -> np.ndarray:
        return np.array([getattr(record, column) for record in self.records], dtype=float)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([record.model_dump() for record in self.records], columns=TRACE_COLUMNS)
        return frame.astype({"step": int})

    def to_csv_text(self, float_format: str = "%.17g") -> str:
        body = self.to_frame().to_csv(index=False, float_format=float_format, lineterminator="\n")
        summary = (
            f"acc_direct,{float_format % self.accumulated_direct},"
            f"acc_sum,{float_format % self.accumulated_sum},,\n"
        )
        return body + summary

    def to_csv(self, path: Union[str, Path], float_format: str = "%.17g") -> None:
        Path(path).write_text(self.to_csv_text(float_format), encoding="utf-8")

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "ErrorTrace":
        text = Path(path).read_text(encoding="utf-8")
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
        summary = frame[frame["step"] == "acc_direct"]
        data = frame[frame["step"] != "acc_direct"]
        records = [
            StepErrorRecord(**{column: _parse_float(row[column]) for column in TRACE_COLUMNS[1:]},
                            step=int(row["step"]))
            for _, row in data.iterrows()
        ]
        direct = accumulated = float("nan")
        if not summary.empty:
            row = summary.iloc[0]
            direct = _parse_float(row["phys_err"])
            accumulated = _parse_float(row["tot_err"])
        return cls(records=records, accumulated_direct=direct, accumulated_sum=accumulated)

def _parse_float(text: str) -> float:
    return float("nan") if text in ("", "nan", "NaN") else float(text)

class WorstCaseBounds(BaseModel):
    order: int
    dt: float
    n_qubits: int
    gamma: float = 0.0
    phys_bound: float
    alg_empirical: float
    alg_commutator: Optional[float] = None
    alg_trace_bound: Optional[float] = None   # 2 * alg_empirical

class ObservableErrorRecord(BaseModel):
    step: int
    alg_ob: float
    phys_ob: float
    alg_val: float
    phys_val: float
