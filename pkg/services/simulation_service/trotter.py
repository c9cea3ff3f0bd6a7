# trotter.py - Product-formula schedules and one-step unitaries
# This file builds PF1/PF2 and recursive higher even-order schedules, realises
# their step unitaries with a memoised group-exponential cache, and exposes the
# exact propagator and the multiplicative Trotter error operator.

import logging
import threading
from typing import Dict, List, Optional, Tuple

import numpy as np

from shared.utils.errors import ConfigError, SizeLimitError
from .config import UpsilonConvention, settings
from .hamiltonians import group_spectrum, hamiltonian_spectrum
from .models import GroupedHamiltonian, Schedule
from .numeric_core import exp_from_spectrum

logger = logging.getLogger(__name__)

def suzuki_u(p: int) -> float:
    """u_p = 1/(4 - 4^{1/(p-1)}) of the recursive construction."""
    return 1.0 / (4.0 - 4.0 ** (1.0 / (p - 1)))

def _validate_order(p: int) -> None:
    if p != 1 and (p < 2 or p % 2 != 0):
        raise ConfigError(f"product-formula order must be 1 or a positive even integer, got {p}")

def _merge_adjacent(entries: List[Tuple[int, float]]) -> List[Tuple[int, float]]:
    merged: List[Tuple[int, float]] = []
    for group, coefficient in entries:
        if merged and merged[-1][0] == group:
            merged[-1] = (group, merged[-1][1] + coefficient)
        else:
            merged.append((group, coefficient))
    return merged

def _raw_entries(p: int, L: int) -> List[Tuple[int, float]]:
    if p == 1:
        return [(l, 1.0) for l in range(L)]
    if p == 2:
        half = [(l, 0.5) for l in range(L)]
        return half + half[::-1]
    u = suzuki_u(p)
    inner = _raw_entries(p - 2, L)

    def scaled(factor: float) -> List[Tuple[int, float]]:
        return [(group, coefficient * factor) for group, coefficient in inner]

    return scaled(u) * 2 + scaled(1.0 - 4.0 * u) + scaled(u) * 2

def layer_count(p: int, convention: Optional[UpsilonConvention] = None) -> int:
    """Circuit layers per Trotter step (Upsilon), configurable per order."""
    _validate_order(p)
    if p in settings.upsilon_overrides:
        return int(settings.upsilon_overrides[p])
    convention = settings.upsilon_convention if convention is None else convention
    if p == 1:
        return 2
    if p == 2 and convention == UpsilonConvention.UNMERGED:
        return 4
    return int(round(2 * 5 ** (p // 2 - 1)))

def build_schedule(p: int, L: int, merge: bool = True) -> Schedule:
    """Schedule of one p-th order step over L groups; entries are fractions of dt."""
    _validate_order(p)
    if L < 1:
        raise ConfigError(f"schedule needs at least one group, got L={L}")
    entries = _raw_entries(p, L)
    if merge:
        entries = _merge_adjacent(entries)
    return Schedule(order=p, entries=entries, layer_count=layer_count(p))

class ProductFormula:
    """Step unitaries of one schedule on one Hamiltonian.

    Group exponentials are memoised on (group, coefficient * dt); the cache is
    guarded by a lock so one instance can serve concurrent readers.
    """

    def __init__(self, H: GroupedHamiltonian, schedule: Schedule):
        for group, _ in schedule.entries:
            if not 0 <= group < H.num_groups:
                raise ConfigError(f"schedule group {group} invalid for {H.num_groups} groups")
        self.H = H
        self.schedule = schedule
        self._cache: Dict[Tuple[int, float], np.ndarray] = {}
        self._lock = threading.Lock()

    def group_exponential(self, group: int, theta: float) -> np.ndarray:
        key = (group, theta)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        eigenvalues, eigenvectors = group_spectrum(self.H, group)
        factor = exp_from_spectrum(eigenvalues, eigenvectors, theta)
        with self._lock:
            self._cache.setdefault(key, factor)
        return factor

    def step_unitary(self, dt: float) -> np.ndarray:
        dim = 2 ** self.H.n_qubits
        unitary = np.eye(dim, dtype=complex)
        if dt == 0.0:
            return unitary
        for group, coefficient in self.schedule.entries:
            unitary = unitary @ self.group_exponential(group, coefficient * dt)
        return unitary

def step_unitary(H: GroupedHamiltonian, schedule: Schedule, dt: float) -> np.ndarray:
    return ProductFormula(H, schedule).step_unitary(dt)

def exact_unitary(H: GroupedHamiltonian, t: float) -> np.ndarray:
    """exp(-iHt) from the eigendecomposition of the assembled matrix."""
    if H.n_qubits > settings.max_dense_qubits:
        raise SizeLimitError("exact_unitary", H.n_qubits, settings.max_dense_qubits)
    eigenvalues, eigenvectors = hamiltonian_spectrum(H)
    return exp_from_spectrum(eigenvalues, eigenvectors, t)

def multiplicative_error_operator(U: np.ndarray, PF: np.ndarray) -> np.ndarray:
    """M_p = U^dag PF - I, so that PF = U (I + M_p)."""
    if U.shape != PF.shape or U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ConfigError(f"dimension mismatch: U {U.shape} vs PF {PF.shape}")
    return U.conj().T @ PF - np.eye(U.shape[0], dtype=complex)
