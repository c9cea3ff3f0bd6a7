# hamiltonians.py - Benchmark Hamiltonians as grouped Pauli-string sums
# This file builds the transverse-field Ising, power-law Heisenberg and
# Fermi-Hubbard models, assembles dense matrices and finds ground states.

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from shared.utils.errors import ConfigError, SizeLimitError
from .config import settings
from .models import DensityMatrix, GroupedHamiltonian, PauliString
from .numeric_core import pure_state

logger = logging.getLogger(__name__)

# Dense assembly

def pauli_matrix(letters: str) -> np.ndarray:
    """Dense matrix of a Pauli string from its X/Z bit masks.

    P|j> = phase(j) |j xor x_mask> with phase(j) = i^{#Y} (-1)^{popcount(j & z_mask)}.
    """
    n = len(letters)
    dim = 2 ** n
    x_mask = z_mask = 0
    y_count = 0
    for q, letter in enumerate(letters.upper()):
        bit = 1 << (n - 1 - q)
        if letter in "XY":
            x_mask |= bit
        if letter in "YZ":
            z_mask |= bit
        if letter == "Y":
            y_count += 1
    columns = np.arange(dim)
    parity = np.zeros(dim, dtype=np.int64)
    masked = columns & z_mask
    while np.any(masked):
        parity ^= masked & 1
        masked >>= 1
    phases = (1j ** y_count) * (1 - 2 * parity)
    matrix = np.zeros((dim, dim), dtype=complex)
    matrix[columns ^ x_mask, columns] = phases
    return matrix

def terms_matrix(terms: Sequence[PauliString], n_qubits: int) -> np.ndarray:
    dim = 2 ** n_qubits
    matrix = np.zeros((dim, dim), dtype=complex)
    for term in terms:
        matrix += term.coefficient * pauli_matrix(term.letters)
    return matrix

def _require_dense(H: GroupedHamiltonian, what: str, limit: Optional[int] = None) -> None:
    limit = settings.max_dense_qubits if limit is None else limit
    if H.n_qubits > limit:
        raise SizeLimitError(what, H.n_qubits, limit)

def group_matrix(H: GroupedHamiltonian, group: int) -> np.ndarray:
    """Dense matrix of H_l, cached on the Hamiltonian."""
    cache = H._group_matrices
    if group not in cache:
        _require_dense(H, "group_matrix")
        cache[group] = terms_matrix(H.groups[group], H.n_qubits)
    return cache[group]

def group_spectrum(H: GroupedHamiltonian, group: int) -> Tuple[np.ndarray, np.ndarray]:
    cache = H._group_spectra
    if group not in cache:
        cache[group] = la.eigh(group_matrix(H, group))
    return cache[group]

def hamiltonian_matrix(H: GroupedHamiltonian) -> np.ndarray:
    if H._matrix is None:
        _require_dense(H, "hamiltonian_matrix")
        dim = 2 ** H.n_qubits
        matrix = np.zeros((dim, dim), dtype=complex)
        for group in range(H.num_groups):
            matrix += group_matrix(H, group)
        H._matrix = matrix
    return H._matrix

def hamiltonian_spectrum(H: GroupedHamiltonian) -> Tuple[np.ndarray, np.ndarray]:
    if H._spectrum is None:
        H._spectrum = la.eigh(hamiltonian_matrix(H))
    return H._spectrum

# Model builders

def _collect(n_qubits: int, accumulator: Dict[str, float]) -> List[PauliString]:
    return [
        PauliString(n_qubits=n_qubits, letters=letters, coefficient=coefficient)
        for letters, coefficient in accumulator.items()
        if coefficient != 0.0
    ]

def _add(accumulator: Dict[str, float], n_qubits: int, sites: Dict[int, str], coefficient: float) -> None:
    letters = ["I"] * n_qubits
    for site, letter in sites.items():
        letters[site] = letter
    key = "".join(letters)
    accumulator[key] = accumulator.get(key, 0.0) + coefficient

def build_tfi(n: int, J: float, h: float, periodic: bool = False) -> GroupedHamiltonian:
    """H = J sum X_j X_{j+1} + h sum Z_j in the XZ two-group form."""
    if n < 2:
        raise ConfigError(f"build_tfi requires n >= 2, got {n}")
    x_terms: Dict[str, float] = {}
    z_terms: Dict[str, float] = {}
    bonds = [(j, j + 1) for j in range(n - 1)]
    if periodic and n > 2:
        bonds.append((n - 1, 0))
    for a, b in bonds:
        _add(x_terms, n, {a: "X", b: "X"}, J)
    for j in range(n):
        _add(z_terms, n, {j: "Z"}, h)
    label = f"tfi(n={n},J={J},h={h},periodic={periodic})"
    logger.debug(f"Built {label} with {len(bonds)} bonds")
    return GroupedHamiltonian(n_qubits=n, groups=[_collect(n, x_terms), _collect(n, z_terms)], label=label)

def build_powerlaw_heisenberg(n: int, alpha: float, fields: Optional[Sequence[float]] = None) -> GroupedHamiltonian:
    """Heisenberg chain with 1/|k-j|^alpha couplings in XYZ grouping."""
    if n < 2:
        raise ConfigError(f"build_powerlaw_heisenberg requires n >= 2, got {n}")
    if alpha <= 0:
        raise ConfigError(f"power-law exponent alpha must be positive, got {alpha}")
    fields = [0.0] * n if fields is None else list(fields)
    if len(fields) != n:
        raise ConfigError(f"expected {n} local fields, got {len(fields)}")
    groups: List[List[PauliString]] = []
    for letter in "XYZ":
        terms: Dict[str, float] = {}
        for j in range(n - 1):
            for k in range(j + 1, n):
                _add(terms, n, {j: letter, k: letter}, 1.0 / abs(k - j) ** alpha)
        if letter == "Z":
            for j, field in enumerate(fields):
                _add(terms, n, {j: "Z"}, float(field))
        groups.append(_collect(n, terms))
    return GroupedHamiltonian(n_qubits=n, groups=groups, label=f"powerlaw(n={n},alpha={alpha})")

def fermion_mode(site: int, spin: int) -> int:
    """Jordan-Wigner qubit of (site, spin): spin-up on even qubits, spin-down on odd."""
    return 2 * site + spin

def jw_annihilation(mode: int, n_modes: int) -> np.ndarray:
    """Dense a_mode = Z_0 ... Z_{mode-1} (X + iY)/2 with occupied = |1>."""
    if not 0 <= mode < n_modes:
        raise ConfigError(f"mode {mode} out of range for {n_modes} modes")
    z_string = "Z" * mode
    rest = "I" * (n_modes - mode - 1)
    return 0.5 * (pauli_matrix(z_string + "X" + rest) + 1j * pauli_matrix(z_string + "Y" + rest))

def _add_hopping(accumulator: Dict[str, float], n_qubits: int, p: int, q: int, v: float) -> None:
    """a_p^dag a_q + a_q^dag a_p = (X_p Z..Z X_q + Y_p Z..Z Y_q)/2 for p < q."""
    between = {m: "Z" for m in range(p + 1, q)}
    _add(accumulator, n_qubits, {p: "X", q: "X", **between}, v / 2.0)
    _add(accumulator, n_qubits, {p: "Y", q: "Y", **between}, v / 2.0)

def build_fermi_hubbard(n_sites: int, v: float, u: float) -> GroupedHamiltonian:
    """Open 1D Fermi-Hubbard chain: H_even + H_odd + H_int on 2 n_sites qubits."""
    if n_sites < 2:
        raise ConfigError(f"build_fermi_hubbard requires n_sites >= 2, got {n_sites}")
    n = 2 * n_sites
    even: Dict[str, float] = {}
    odd: Dict[str, float] = {}
    interaction: Dict[str, float] = {}
    for site in range(n_sites - 1):
        target = even if site % 2 == 0 else odd
        for spin in (0, 1):
            _add_hopping(target, n, fermion_mode(site, spin), fermion_mode(site + 1, spin), v)
    if u != 0.0:
        # n_up n_down = (I - Z_a)(I - Z_b)/4
        for site in range(n_sites):
            a, b = fermion_mode(site, 0), fermion_mode(site, 1)
            _add(interaction, n, {}, u / 4.0)
            _add(interaction, n, {a: "Z"}, -u / 4.0)
            _add(interaction, n, {b: "Z"}, -u / 4.0)
            _add(interaction, n, {a: "Z", b: "Z"}, u / 4.0)
    groups = [_collect(n, even), _collect(n, odd), _collect(n, interaction)]
    return GroupedHamiltonian(n_qubits=n, groups=groups, label=f"fermi_hubbard(sites={n_sites},v={v},u={u})")

def ground_state(H: GroupedHamiltonian) -> Tuple[float, DensityMatrix]:
    """Minimum eigenvalue of H and a unit eigenvector as a pure state."""
    _require_dense(H, "ground_state")
    eigenvalues, eigenvectors = hamiltonian_spectrum(H)
    energy = float(eigenvalues[0])
    logger.info(f"Ground state of {H.label}: E = {energy:.12g}")
    return energy, pure_state(eigenvectors[:, 0])
