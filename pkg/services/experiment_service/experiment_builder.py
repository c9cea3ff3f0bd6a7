# experiment_builder.py - Config to simulation objects
# This file turns an ExperimentConfig into Hamiltonians, schedules, noise
# specifications and initial states.

import logging
from typing import List, Optional, Tuple

from shared.utils.errors import ConfigError, SizeLimitError
from services.simulation_service.config import settings as simulation_settings
from services.simulation_service.hamiltonian_loader import load_hamiltonian
from services.simulation_service.hamiltonians import (
    build_fermi_hubbard, build_powerlaw_heisenberg, build_tfi, ground_state,
)
from services.simulation_service.metrics import worst_one_step_state
from services.simulation_service.models import DensityMatrix, GroupedHamiltonian, NoiseSpec, Schedule
from services.simulation_service.numeric_core import basis_state, haar_random_state, plus_state
from services.simulation_service.trotter import ProductFormula, build_schedule, exact_unitary
from .models import ExperimentConfig, HamiltonianKind, InitialState, NoiseName

logger = logging.getLogger(__name__)

def build_hamiltonian(config: ExperimentConfig, n: Optional[int] = None) -> GroupedHamiltonian:
    spec = config.hamiltonian
    if spec.kind == HamiltonianKind.FILE:
        H = load_hamiltonian(spec.path)
        if n is not None and n != H.n_qubits:
            raise ConfigError(f"requested n={n} but {spec.path} has {H.n_qubits} qubits")
        return H
    if n is None:
        raise ConfigError(f"{spec.kind.value} Hamiltonian needs n")
    if spec.kind == HamiltonianKind.TFI:
        return build_tfi(n, spec.J, spec.h, spec.periodic)
    if spec.kind == HamiltonianKind.POWERLAW:
        return build_powerlaw_heisenberg(n, spec.alpha, spec.fields)
    if n % 2:
        raise ConfigError(f"fermi_hubbard needs an even qubit count (2 per site), got n={n}")
    return build_fermi_hubbard(n // 2, spec.v, spec.u)

def build_noise(config: ExperimentConfig, gamma: float) -> NoiseSpec:
    options = {"placement": config.placement, "time_rate": config.time_rate}
    if config.noise == NoiseName.DEPOLARIZING:
        return NoiseSpec.depolarizing(gamma, **options)
    if config.noise == NoiseName.DEPHASING:
        return NoiseSpec.dephasing(gamma, **options)
    if config.noise == NoiseName.AMPLITUDE_DAMPING:
        return NoiseSpec.amplitude_damping(gamma, **options)
    if config.pauli_weights is None:
        raise ConfigError("pauli noise needs pauli_weights")
    return NoiseSpec(gamma=gamma, pauli_weights=config.pauli_weights, label="pauli", **options)

def build_experiment_schedule(config: ExperimentConfig, H: GroupedHamiltonian) -> Schedule:
    return build_schedule(config.order, H.num_groups)

def build_initial_states(
    config: ExperimentConfig, H: GroupedHamiltonian, schedule: Schedule, dt: float
) -> List[Tuple[str, DensityMatrix]]:
    """Labelled initial states; haar yields `haar_count` states seeded seed, seed+1, ..."""
    n = H.n_qubits
    if n > simulation_settings.max_dense_qubits:
        raise SizeLimitError("initial state", n, simulation_settings.max_dense_qubits)
    if config.initial == InitialState.ZERO:
        return [("zero", basis_state("0" * n))]
    if config.initial == InitialState.PLUS:
        return [("plus", plus_state(n))]
    if config.initial == InitialState.GROUND:
        _, state = ground_state(H)
        return [("ground", state)]
    if config.initial == InitialState.HAAR:
        return [
            (f"haar{index}", haar_random_state(n, config.seed + index))
            for index in range(config.haar_count)
        ]
    PF = ProductFormula(H, schedule).step_unitary(dt)
    return [("worst_one_step", worst_one_step_state(exact_unitary(H, dt), PF))]
