# noise.py - Local noise channels and the noisy Trotter circuit
# This file applies Pauli and amplitude-damping channels qubit by qubit,
# builds their adjoints, computes Pauli-channel diamond distances and drives
# the composition (E o PF)^r on a density matrix.

import logging
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence

import numpy as np

from shared.utils.errors import ConfigError, SizeLimitError
from .config import settings
from .models import (
    DensityMatrix, GroupedHamiltonian, NoiseKind, NoiseSpec, Schedule,
    Trajectory, TrajectoryConfig,
)
from .numeric_core import PAULI_MATRICES, validate_qubits
from .trotter import ProductFormula

logger = logging.getLogger(__name__)

# Kraus sets

def pauli_kraus(gx: float, gy: float, gz: float) -> List[np.ndarray]:
    _check_pauli_rates(gx, gy, gz)
    identity_weight = 1.0 - gx - gy - gz
    return [
        np.sqrt(max(identity_weight, 0.0)) * PAULI_MATRICES["I"],
        np.sqrt(gx) * PAULI_MATRICES["X"],
        np.sqrt(gy) * PAULI_MATRICES["Y"],
        np.sqrt(gz) * PAULI_MATRICES["Z"],
    ]

def amplitude_damping_kraus(g: float) -> List[np.ndarray]:
    _check_probability(g, "amplitude damping rate")
    return [
        np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - g)]], dtype=complex),
        np.array([[0.0, np.sqrt(g)], [0.0, 0.0]], dtype=complex),
    ]

def _check_probability(value: float, what: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{what} must lie in [0, 1], got {value}")

def _check_pauli_rates(gx: float, gy: float, gz: float) -> None:
    for name, value in (("gx", gx), ("gy", gy), ("gz", gz)):
        if value < 0.0:
            raise ConfigError(f"Pauli rate {name} must be non-negative, got {value}")
    if gx + gy + gz > 1.0 + 1e-12:
        raise ConfigError(f"Pauli rates sum to {gx + gy + gz} > 1")

def spec_kraus(spec: NoiseSpec, gamma: Optional[float] = None) -> List[np.ndarray]:
    gamma = spec.gamma if gamma is None else gamma
    if spec.kind == NoiseKind.AMPLITUDE_DAMPING:
        return amplitude_damping_kraus(gamma)
    return pauli_kraus(*spec.pauli_rates(gamma))

# Qubit-local contraction

def _superoperator(kraus_ops: Sequence[np.ndarray]) -> np.ndarray:
    """S[a, d, b, c] such that rho'[a, d] = sum_bc S[a, d, b, c] rho[b, c] on one qubit."""
    return sum(np.einsum("ab,dc->adbc", K, K.conj()) for K in kraus_ops)

def apply_kraus_to_matrix(
    matrix: np.ndarray, n_qubits: int, kraus_ops: Sequence[np.ndarray], qubits: Iterable[int]
) -> np.ndarray:
    """Tensor-product channel on the listed qubits as 4x4 superoperator contractions."""
    qubits = validate_qubits(qubits, n_qubits)
    superop = _superoperator(kraus_ops)
    out = np.asarray(matrix, dtype=complex)
    dim = 2 ** n_qubits
    for q in qubits:
        left, right = 2 ** q, 2 ** (n_qubits - 1 - q)
        tensor = out.reshape(left, 2, right, left, 2, right)
        tensor = np.tensordot(superop, tensor, axes=([2, 3], [1, 4]))
        out = tensor.transpose(2, 0, 3, 4, 1, 5).reshape(dim, dim)
    return out

def _as_state(matrix: np.ndarray, n_qubits: int) -> DensityMatrix:
    return DensityMatrix(n_qubits=n_qubits, matrix=(matrix + matrix.conj().T) / 2.0)

def _all_qubits(rho_qubits: int, qubits: Optional[Iterable[int]]) -> List[int]:
    return list(range(rho_qubits)) if qubits is None else list(qubits)

def apply_pauli_channel(
    rho: DensityMatrix, gx: float, gy: float, gz: float, qubits: Optional[Iterable[int]] = None
) -> DensityMatrix:
    kraus_ops = pauli_kraus(gx, gy, gz)
    qubits = _all_qubits(rho.n_qubits, qubits)
    return _as_state(apply_kraus_to_matrix(rho.matrix, rho.n_qubits, kraus_ops, qubits), rho.n_qubits)

def apply_amplitude_damping(
    rho: DensityMatrix, g: float, qubits: Optional[Iterable[int]] = None
) -> DensityMatrix:
    kraus_ops = amplitude_damping_kraus(g)
    qubits = _all_qubits(rho.n_qubits, qubits)
    return _as_state(apply_kraus_to_matrix(rho.matrix, rho.n_qubits, kraus_ops, qubits), rho.n_qubits)

def apply_noise(
    rho: DensityMatrix, spec: NoiseSpec, gamma: Optional[float] = None, qubits: Optional[Iterable[int]] = None
) -> DensityMatrix:
    """One noise layer of `spec` (at `gamma` if given) on every listed qubit."""
    qubits = _all_qubits(rho.n_qubits, qubits)
    matrix = apply_kraus_to_matrix(rho.matrix, rho.n_qubits, spec_kraus(spec, gamma), qubits)
    return _as_state(matrix, rho.n_qubits)

def apply_step_noise(rho: DensityMatrix, spec: NoiseSpec, rates: Sequence[float]) -> DensityMatrix:
    """All noise layers of one Trotter step, in order."""
    for rate in rates:
        if rate > 0.0:
            rho = apply_noise(rho, spec, rate)
    return rho

def adjoint_channel(
    O: np.ndarray, spec: NoiseSpec, gamma: Optional[float] = None, qubits: Optional[Iterable[int]] = None
) -> np.ndarray:
    """Heisenberg-picture channel E^dag(O) = sum_K K^dag O K on every listed qubit."""
    O = np.asarray(O, dtype=complex)
    n_qubits = int(round(np.log2(O.shape[0])))
    qubits = _all_qubits(n_qubits, qubits)
    adjoint_ops = [K.conj().T for K in spec_kraus(spec, gamma)]
    return apply_kraus_to_matrix(O, n_qubits, adjoint_ops, qubits)

def adjoint_step_noise(O: np.ndarray, spec: NoiseSpec, rates: Sequence[float]) -> np.ndarray:
    # adjoint of a composition reverses the order
    for rate in reversed(list(rates)):
        if rate > 0.0:
            O = adjoint_channel(O, spec, rate)
    return O

# Channel distances

def pauli_distribution(spec: NoiseSpec) -> np.ndarray:
    gx, gy, gz = spec.pauli_rates()
    return np.array([1.0 - gx - gy - gz, gx, gy, gz])

def diamond_distance_pauli(spec1: NoiseSpec, spec2: NoiseSpec, n: int) -> float:
    """||E_q - E_r||_diamond = ||q - r||_1 for the n-qubit product Pauli channels."""
    if spec1.kind != NoiseKind.PAULI or spec2.kind != NoiseKind.PAULI:
        raise ConfigError("diamond_distance_pauli has a closed form only for Pauli channels")
    if n < 1:
        raise ConfigError(f"diamond_distance_pauli requires n >= 1, got {n}")
    q, r = pauli_distribution(spec1), pauli_distribution(spec2)
    # against the identity channel the product vector differs only in the all-I entry
    for channel, identity in ((q, r), (r, q)):
        if identity[0] == 1.0:
            return 2.0 * (1.0 - channel[0] ** n)
    if n > settings.max_dense_qubits:
        raise SizeLimitError("diamond_distance_pauli", n, settings.max_dense_qubits)
    q_full, r_full = np.ones(1), np.ones(1)
    for _ in range(n):
        q_full, r_full = np.kron(q_full, q), np.kron(r_full, r)
    return float(np.sum(np.abs(q_full - r_full)))

def is_unital(spec: NoiseSpec) -> bool:
    return spec.is_unital

# Noisy circuit

class NoisyStep(NamedTuple):
    step: int
    before: DensityMatrix    # rho_{d-1}
    evolved: DensityMatrix   # PF rho_{d-1} PF^dag
    after: DensityMatrix     # rho_d

def validate_circuit(
    H: GroupedHamiltonian, schedule: Schedule, r: int, t: float, spec: NoiseSpec, rho0: DensityMatrix
) -> List[float]:
    """Reject invalid configurations before any compute; returns per-step layer rates."""
    if r < 1:
        raise ConfigError(f"Trotter number r must be >= 1, got {r}")
    if t <= 0:
        raise ConfigError(f"evolution time t must be positive, got {t}")
    if H.n_qubits > settings.max_dense_qubits:
        raise SizeLimitError("run_noisy_circuit", H.n_qubits, settings.max_dense_qubits)
    if rho0.n_qubits != H.n_qubits:
        raise ConfigError(f"initial state has {rho0.n_qubits} qubits, Hamiltonian has {H.n_qubits}")
    for group, _ in schedule.entries:
        if not 0 <= group < H.num_groups:
            raise ConfigError(f"schedule group {group} invalid for {H.num_groups} groups")
    try:
        rates = spec.layer_rates(schedule.layer_count, t / r)
    except ValueError as e:
        raise ConfigError(str(e))
    for rate in rates:
        spec_kraus(spec, rate)
    return rates

def iter_noisy_circuit(
    H: GroupedHamiltonian, schedule: Schedule, r: int, t: float, spec: NoiseSpec,
    rho0: DensityMatrix, step_unitary: Optional[np.ndarray] = None,
) -> Iterator[NoisyStep]:
    """Stream the trajectory rho_d = E(PF rho_{d-1} PF^dag), d = 1..r."""
    rates = validate_circuit(H, schedule, r, t, spec, rho0)
    PF = ProductFormula(H, schedule).step_unitary(t / r) if step_unitary is None else step_unitary
    PF_dag = PF.conj().T
    rho = rho0
    for d in range(1, r + 1):
        evolved = _as_state(PF @ rho.matrix @ PF_dag, rho.n_qubits)
        after = apply_step_noise(evolved, spec, rates)
        yield NoisyStep(step=d, before=rho, evolved=evolved, after=after)
        rho = after

def run_noisy_circuit(
    H: GroupedHamiltonian, schedule: Schedule, r: int, t: float, spec: NoiseSpec, rho0: DensityMatrix,
    retain_states: Optional[bool] = None, initial_label: str = "custom", seed: Optional[int] = None,
) -> Trajectory:
    """Run (E o PF)^r; intermediate states are kept unless streaming is in effect."""
    if retain_states is None:
        retain_states = H.n_qubits <= settings.streaming_threshold_qubits
    config = TrajectoryConfig(
        hamiltonian_label=H.label, order=schedule.order, steps=r, time=t,
        noise=spec, initial_label=initial_label, seed=seed,
    )
    logger.info(f"Running noisy circuit on {H.label}: p={schedule.order}, r={r}, t={t}, noise={spec.label}({spec.gamma})")
    states = [rho0] if retain_states else None
    final = rho0
    for step in iter_noisy_circuit(H, schedule, r, t, spec, rho0):
        final = step.after
        if states is not None:
            states.append(step.after)
    return Trajectory(states=states, final_state=final, config=config)
