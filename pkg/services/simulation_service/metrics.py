# metrics.py - Error quantities of the noisy Trotter circuit
# This file computes one-step physical, algorithmic and total errors, the
# accumulated error and its telescoping bound, entropy diagnostics, worst-case
# Trotter bounds and Heisenberg-picture observable errors.

import logging
import math
import time
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.linalg as la

from shared.utils.errors import ConfigError, SizeLimitError
from .config import settings
from .hamiltonians import group_matrix, pauli_matrix
from .models import (
    DensityMatrix, ErrorTrace, GroupedHamiltonian, NoiseSpec, ObservableErrorRecord, Placement,
    Schedule, StepErrorRecord, TrajectoryConfig, WorstCaseBounds,
)
from .noise import adjoint_step_noise, apply_step_noise, iter_noisy_circuit, validate_circuit
from .numeric_core import (
    commutator, partial_trace, pure_state, spectral_norm, trace_norm, von_neumann_entropy,
)
from .trotter import ProductFormula, build_schedule, exact_unitary

logger = logging.getLogger(__name__)

def burn_in_steps(r: int) -> int:
    """Steps excluded from decay fits: max(5, ceil(0.1 r))."""
    return max(settings.burn_in_min_steps, math.ceil(settings.burn_in_fraction * r))

def decay_fit_window(r: int) -> Tuple[int, int]:
    """Inclusive 1-based step range used for decay fits."""
    return min(burn_in_steps(r) + 1, r), r

# One-step errors

def one_step_physical_error(
    rho: DensityMatrix, spec: NoiseSpec, layer_count: int = 1, dt: Optional[float] = None
) -> float:
    """||rho - E(rho)||_1 for the noise of one Trotter step."""
    if spec.placement == Placement.PER_TIME and dt is None:
        raise ConfigError("per_time placement needs dt to evaluate the physical error")
    rates = spec.layer_rates(layer_count, 0.0 if dt is None else dt)
    noisy = apply_step_noise(rho, spec, rates)
    return trace_norm(rho.matrix - noisy.matrix, hermitian=True)

def one_step_algorithmic_error(rho: DensityMatrix, U: np.ndarray, PF: np.ndarray) -> float:
    """||U rho U^dag - PF rho PF^dag||_1."""
    if U.shape != PF.shape or U.shape[0] != rho.dim:
        raise ConfigError(f"dimension mismatch: rho {rho.dim}, U {U.shape}, PF {PF.shape}")
    ideal = U @ rho.matrix @ U.conj().T
    trotter = PF @ rho.matrix @ PF.conj().T
    difference = ideal - trotter
    return trace_norm((difference + difference.conj().T) / 2.0, hermitian=True)

def algorithmic_error_commutator_form(rho: DensityMatrix, U: np.ndarray, PF: np.ndarray) -> float:
    """||[rho, M_p]||_1 with M_p = U^dag PF - I; equal to the one-step algorithmic error."""
    M = U.conj().T @ PF - np.eye(U.shape[0], dtype=complex)
    return trace_norm(commutator(rho.matrix, M))

def one_step_total_error(
    rho: DensityMatrix, U: np.ndarray, PF: np.ndarray, spec: NoiseSpec, rates: Sequence[float]
) -> float:
    """||U rho U^dag - E(PF rho PF^dag)||_1."""
    ideal = U @ rho.matrix @ U.conj().T
    evolved = DensityMatrix(n_qubits=rho.n_qubits, matrix=_hermitize(PF @ rho.matrix @ PF.conj().T))
    noisy = apply_step_noise(evolved, spec, rates)
    return trace_norm(_hermitize(ideal - noisy.matrix), hermitian=True)

def _hermitize(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2.0

# Entropy diagnostics

def relative_entropy_to_mixed(rho: DensityMatrix) -> float:
    """D(rho || I/2^n) = n - S(rho) in bits."""
    return max(rho.n_qubits - von_neumann_entropy(rho), 0.0)

def local_relative_entropies(rho: DensityMatrix) -> List[float]:
    """D(rho || rho_{F-bar} (x) I/2) for every single-qubit F.

    Uses D = 1 + S(rho_{F-bar}) - S(rho), exact in base 2 because
    log(A (x) I/2) = log A (x) I - I.
    """
    if rho.n_qubits < 1:
        raise ConfigError("entropy diagnostics need at least one qubit")
    entropy = von_neumann_entropy(rho)
    return [
        max(1.0 + von_neumann_entropy(partial_trace(rho, [q])) - entropy, 0.0)
        for q in range(rho.n_qubits)
    ]

def entropy_ratio(rho: DensityMatrix) -> float:
    """Mean local entropy distance over global distance; nan when rho = I/2^n."""
    global_distance = relative_entropy_to_mixed(rho)
    if global_distance < 1e-12:
        logger.debug("entropy_ratio: maximally mixed state, returning nan sentinel")
        return float("nan")
    local = local_relative_entropies(rho)
    return float(np.mean(local)) / global_distance

# Accumulated error

def accumulated_error(
    H: GroupedHamiltonian, schedule: Schedule, r: int, t: float, spec: NoiseSpec, rho0: DensityMatrix,
    entropy_diagnostics: bool = True, initial_label: str = "custom", seed: Optional[int] = None,
) -> Tuple[float, float, ErrorTrace]:
    """Direct accumulated error, its telescoping sum bound, and the per-step trace.

    Record d is evaluated on rho_{d-1}, the input of step d; entropy
    diagnostics of record d are taken on rho_d.
    """
    rates = validate_circuit(H, schedule, r, t, spec, rho0)
    started = time.perf_counter()
    dt = t / r
    propagator = ProductFormula(H, schedule)
    PF = propagator.step_unitary(dt)
    U = exact_unitary(H, dt)
    U_dag = U.conj().T

    records: List[StepErrorRecord] = []
    final = rho0
    for step in iter_noisy_circuit(H, schedule, r, t, spec, rho0, step_unitary=PF):
        before = step.before.matrix
        ideal = U @ before @ U_dag
        alg = trace_norm(_hermitize(ideal - step.evolved.matrix), hermitian=True)
        phys = trace_norm(_hermitize(step.evolved.matrix - step.after.matrix), hermitian=True)
        tot = trace_norm(_hermitize(ideal - step.after.matrix), hermitian=True)
        ratio = rel = float("nan")
        if entropy_diagnostics:
            rel = relative_entropy_to_mixed(step.after)
            ratio = entropy_ratio(step.after)
        records.append(StepErrorRecord(
            step=step.step, phys_err=phys, alg_err=alg, tot_err=tot, entropy_ratio=ratio, rel_entropy=rel,
        ))
        final = step.after

    U_total = exact_unitary(H, t)
    ideal_final = U_total @ rho0.matrix @ U_total.conj().T
    direct = trace_norm(_hermitize(ideal_final - final.matrix), hermitian=True)
    accumulated = float(sum(record.tot_err for record in records))
    config = TrajectoryConfig(
        hamiltonian_label=H.label, order=schedule.order, steps=r, time=t,
        noise=spec, initial_label=initial_label, seed=seed,
    )
    logger.info(
        f"Accumulated error on {H.label} (p={schedule.order}, r={r}, gamma={spec.gamma}): "
        f"direct={direct:.6e}, sum={accumulated:.6e} in {time.perf_counter() - started:.1f}s"
    )
    trace = ErrorTrace(records=records, accumulated_direct=direct, accumulated_sum=accumulated, config=config)
    return direct, accumulated, trace

# Worst-case bounds

def _commutator_bound(H: GroupedHamiltonian, p: int, dt: float) -> float:
    matrices = [group_matrix(H, l) for l in range(H.num_groups)]
    total = 0.0
    for l1, G in enumerate(matrices):
        later = sum(matrices[l1 + 1:], np.zeros_like(G))
        if p == 1:
            total += spectral_norm(commutator(later, G)) * dt ** 2 / 2.0
        else:
            inner = commutator(later, G)
            total += spectral_norm(commutator(later, inner)) * dt ** 3 / 12.0
            total += spectral_norm(commutator(G, commutator(G, later))) * dt ** 3 / 24.0
    return total

def worst_case_trotter_bound(H: GroupedHamiltonian, p: int, dt: float, gamma: float = 0.0) -> WorstCaseBounds:
    """Diamond physical bound plus empirical and nested-commutator Trotter bounds.

    `alg_empirical` and `alg_commutator` are operator norms; `alg_trace_bound`
    is the state-independent trace-distance bound 2 * alg_empirical. The
    commutator form is only built for p in {1, 2} and n within the commutator
    limit; otherwise `alg_commutator` is None.
    """
    schedule = build_schedule(p, H.num_groups)
    PF = ProductFormula(H, schedule).step_unitary(dt)
    U = exact_unitary(H, dt)
    empirical = spectral_norm(PF - U)
    alg_commutator = None
    if p in (1, 2) and H.n_qubits <= settings.max_commutator_qubits:
        alg_commutator = _commutator_bound(H, p, dt)
    elif p in (1, 2):
        logger.warning(f"Commutator bound skipped: n={H.n_qubits} above {settings.max_commutator_qubits}")
    return WorstCaseBounds(
        order=p, dt=dt, n_qubits=H.n_qubits, gamma=gamma,
        phys_bound=2.0 * (1.0 - (1.0 - gamma) ** H.n_qubits),
        alg_empirical=empirical, alg_commutator=alg_commutator,
        alg_trace_bound=2.0 * empirical,
    )

def worst_case_prefactor(H: GroupedHamiltonian, p: int, dt: float, use_commutator: bool = False) -> float:
    """Worst-case B with trace-distance error <= B dt^{p+1} for every input state.

    The state-independent one-step bound is 2 ||PF_p(dt) - U(dt)||_inf, or twice
    the nested-commutator bound when `use_commutator` is set.
    """
    if use_commutator:
        bounds = worst_case_trotter_bound(H, p, dt)
        if bounds.alg_commutator is None:
            raise ConfigError(f"no commutator bound for p={p}, n={H.n_qubits}")
        operator_norm = bounds.alg_commutator
    else:
        schedule = build_schedule(p, H.num_groups)
        operator_norm = spectral_norm(ProductFormula(H, schedule).step_unitary(dt) - exact_unitary(H, dt))
    return 2.0 * operator_norm / dt ** (p + 1)

def worst_one_step_state(U: np.ndarray, PF: np.ndarray) -> DensityMatrix:
    """Pure state on the top right-singular vector of U - PF."""
    _, _, vh = la.svd(U - PF)
    return pure_state(vh[0].conj())

# Observables

def standard_observable(name: str, n: int) -> np.ndarray:
    """Single-site spin, two-site spin, Loschmidt echo or string order observable."""
    dim = 2 ** n
    if name == "single_site_spin":
        return sum(pauli_matrix("I" * j + "Z" + "I" * (n - j - 1)) for j in range(n)) / n
    if name == "two_site_spin":
        if n < 2:
            raise ConfigError("two_site_spin needs n >= 2")
        total = np.zeros((dim, dim), dtype=complex)
        for i in range(n):
            for j in range(i + 1, n):
                letters = ["I"] * n
                letters[i] = letters[j] = "Z"
                total += pauli_matrix("".join(letters))
        return total * 2.0 / (n * (n - 1))
    if name == "loschmidt_echo":
        echo = np.zeros((dim, dim), dtype=complex)
        echo[0, 0] = 1.0
        return echo
    if name == "string_order":
        if n < 2:
            raise ConfigError("string_order needs n >= 2")
        return pauli_matrix("X" + "Z" * (n - 2) + "X")
    raise ConfigError(f"unknown observable '{name}'")

def observable_errors(
    H: GroupedHamiltonian, schedule: Schedule, r: int, t: float, spec: NoiseSpec,
    O: np.ndarray, rho_ref: DensityMatrix,
) -> List[ObservableErrorRecord]:
    """Per-step Heisenberg-picture errors of O_{d-1} and their expectation values in rho_ref."""
    if H.n_qubits > settings.max_commutator_qubits:
        raise SizeLimitError("observable_errors", H.n_qubits, settings.max_commutator_qubits)
    if r < 1 or t <= 0:
        raise ConfigError(f"observable_errors needs r >= 1 and t > 0, got r={r}, t={t}")
    dt = t / r
    rates = spec.layer_rates(schedule.layer_count, dt)
    PF = ProductFormula(H, schedule).step_unitary(dt)
    U = exact_unitary(H, dt)
    observable = np.asarray(O, dtype=complex)
    records: List[ObservableErrorRecord] = []
    for d in range(1, r + 1):
        alg_delta = _hermitize(U.conj().T @ observable @ U - PF.conj().T @ observable @ PF)
        noisy = adjoint_step_noise(observable, spec, rates)
        phys_delta = _hermitize(noisy - observable)
        records.append(ObservableErrorRecord(
            step=d,
            alg_ob=spectral_norm(alg_delta, hermitian=True),
            phys_ob=spectral_norm(phys_delta, hermitian=True),
            alg_val=abs(np.trace(rho_ref.matrix @ alg_delta)),
            phys_val=abs(np.trace(rho_ref.matrix @ phys_delta)),
        ))
        observable = _hermitize(PF.conj().T @ noisy @ PF)
    return records

def observable_frame(records: Sequence[ObservableErrorRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.model_dump() for record in records])

def average_traces(traces: Sequence[ErrorTrace]) -> ErrorTrace:
    """Step-wise mean of equally long traces, e.g. over a Haar ensemble."""
    if not traces:
        raise ConfigError("average_traces needs at least one trace")
    if len({trace.steps for trace in traces}) != 1:
        raise ConfigError("traces to average must have equal step counts")
    if len(traces) == 1:
        return traces[0]
    frame = pd.concat([trace.to_frame() for trace in traces]).groupby("step", sort=True).mean()
    records = [StepErrorRecord(step=int(step), **row.to_dict()) for step, row in frame.iterrows()]
    return ErrorTrace(
        records=records,
        accumulated_direct=float(np.mean([trace.accumulated_direct for trace in traces])),
        accumulated_sum=float(np.mean([trace.accumulated_sum for trace in traces])),
        config=traces[0].config,
    )
