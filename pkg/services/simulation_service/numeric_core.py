# numeric_core.py - Dense linear algebra and information-theoretic primitives
# This file contains matrix exponentials, Schatten norms, partial traces,
# entropies and state constructors shared by every other module.
#
# Qubit ordering: qubit 0 is the leftmost tensor factor, i.e. the most
# significant bit of a computational-basis index.

import logging
import math
from functools import reduce
from typing import Iterable, List, Optional, Sequence

import numpy as np
import scipy.linalg as la

from shared.utils.errors import ConfigError
from .config import settings
from .models import DensityMatrix

logger = logging.getLogger(__name__)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

def is_hermitian(matrix: np.ndarray, tol: Optional[float] = None) -> bool:
    tol = settings.hermitian_tol if tol is None else tol
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tol)

def _require_hermitian(matrix: np.ndarray, what: str) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ConfigError(f"{what}: expected a square matrix, got shape {matrix.shape}")
    deviation = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
    # tolerance scales with the largest entry
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    if deviation > settings.hermitian_tol * scale:
        raise ConfigError(f"{what}: matrix is not Hermitian (max |A - A^dag| = {deviation:.3e})")

def exp_from_spectrum(eigenvalues: np.ndarray, eigenvectors: np.ndarray, theta: float) -> np.ndarray:
    """V diag(exp(-i theta lambda)) V^dag from a precomputed eigendecomposition."""
    phases = np.exp(-1j * theta * eigenvalues)
    return (eigenvectors * phases) @ eigenvectors.conj().T

def matrix_exp_hermitian(H: np.ndarray, theta: float) -> np.ndarray:
    """Unitary exp(-i theta H) of a Hermitian generator."""
    H = np.asarray(H, dtype=complex)
    _require_hermitian(H, "matrix_exp_hermitian")
    if theta == 0.0:
        return np.eye(H.shape[0], dtype=complex)
    eigenvalues, eigenvectors = la.eigh(H)
    return exp_from_spectrum(eigenvalues, eigenvectors, theta)

def trace_norm(A: np.ndarray, hermitian: bool = False) -> float:
    """Schatten 1-norm: sum of singular values (|eigenvalues| when Hermitian)."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    if hermitian:
        return float(np.sum(np.abs(la.eigvalsh(A))))
    return float(np.sum(la.svdvals(A)))

def spectral_norm(A: np.ndarray, hermitian: bool = False) -> float:
    """Largest singular value."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    if hermitian:
        return float(np.max(np.abs(la.eigvalsh(A))))
    return float(la.svdvals(A)[0])

def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A

def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, factors, np.eye(1, dtype=complex))

def validate_qubits(qubits: Iterable[int], n_qubits: int) -> List[int]:
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise ConfigError(f"qubit indices {qubits} are not distinct")
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise ConfigError(f"qubit index {q} out of range for {n_qubits} qubits")
    return qubits

def partial_trace_matrix(matrix: np.ndarray, n_qubits: int, traced_qubits: Iterable[int]) -> np.ndarray:
    traced = sorted(validate_qubits(traced_qubits, n_qubits), reverse=True)
    tensor = np.asarray(matrix).reshape([2] * (2 * n_qubits))
    remaining = n_qubits
    # descending order keeps the axes of lower qubits in place
    for q in traced:
        tensor = np.trace(tensor, axis1=q, axis2=q + remaining)
        remaining -= 1
    dim = 2 ** remaining
    return tensor.reshape(dim, dim)

def partial_trace(rho: DensityMatrix, traced_qubits: Iterable[int]) -> DensityMatrix:
    traced = list(traced_qubits)
    reduced = partial_trace_matrix(rho.matrix, rho.n_qubits, traced)
    return DensityMatrix(n_qubits=rho.n_qubits - len(traced), matrix=reduced)

def embed_maximally_mixed(reduced: DensityMatrix, qubit: int, n_qubits: int) -> DensityMatrix:
    """rho_{F-bar} (x) I/2 with the identity factor placed back at position `qubit`."""
    validate_qubits([qubit], n_qubits)
    if reduced.n_qubits != n_qubits - 1:
        raise ConfigError(f"reduced state has {reduced.n_qubits} qubits, expected {n_qubits - 1}")
    left, right = 2 ** qubit, 2 ** (n_qubits - 1 - qubit)
    tensor = reduced.matrix.reshape(left, right, left, right)
    full = np.einsum("abcd,xy->axbcyd", tensor, np.eye(2) / 2.0)
    dim = 2 ** n_qubits
    return DensityMatrix(n_qubits=n_qubits, matrix=full.reshape(dim, dim))

def _entropy_of_spectrum(eigenvalues: np.ndarray) -> float:
    weights = np.clip(np.real(eigenvalues), 0.0, None)
    logs = np.log2(np.maximum(weights, settings.entropy_clamp))
    return float(-np.sum(weights * logs))

def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(rho) in bits; eigenvalues below the clamp are floored inside the log."""
    entropy = _entropy_of_spectrum(la.eigvalsh(rho.matrix))
    return min(max(entropy, 0.0), float(rho.n_qubits))

def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """D(rho || sigma) in bits; +inf when supp(rho) is not inside supp(sigma)."""
    if rho.n_qubits != sigma.n_qubits:
        raise ConfigError(f"relative_entropy: {rho.n_qubits} vs {sigma.n_qubits} qubits")
    clamp = settings.entropy_clamp
    rho_eigs = la.eigvalsh(rho.matrix)
    sigma_eigs, sigma_vecs = la.eigh(sigma.matrix)
    # weight of rho on the (numerical) kernel of sigma
    populations = np.real(np.einsum("ij,jk,ki->i", sigma_vecs.conj().T, rho.matrix, sigma_vecs))
    kernel = sigma_eigs < clamp
    leaked = float(np.sum(populations[kernel]))
    if leaked > settings.state_tol:
        logger.warning(f"relative_entropy: support violation, {leaked:.3e} weight outside supp(sigma)")
        return math.inf
    neg_entropy = -_entropy_of_spectrum(rho_eigs)
    cross = float(np.sum(populations * np.log2(np.maximum(sigma_eigs, clamp))))
    return max(neg_entropy - cross, 0.0)

def maximally_mixed(n_qubits: int) -> DensityMatrix:
    dim = 2 ** n_qubits
    return DensityMatrix(n_qubits=n_qubits, matrix=np.eye(dim, dtype=complex) / dim)

def pure_state(vector: Sequence[complex]) -> DensityMatrix:
    vector = np.asarray(vector, dtype=complex)
    vector = vector / np.linalg.norm(vector)
    n_qubits = int(round(math.log2(vector.size)))
    if 2 ** n_qubits != vector.size:
        raise ConfigError(f"state vector length {vector.size} is not a power of two")
    return DensityMatrix(n_qubits=n_qubits, matrix=np.outer(vector, vector.conj()))

def basis_state(bits: str) -> DensityMatrix:
    """|b_0 b_1 ... b_{n-1}><...| with b_0 on qubit 0."""
    vector = np.zeros(2 ** len(bits), dtype=complex)
    vector[int(bits, 2)] = 1.0
    return pure_state(vector)

def plus_state(n_qubits: int) -> DensityMatrix:
    return pure_state(np.ones(2 ** n_qubits, dtype=complex))

def ghz_state(n_qubits: int) -> DensityMatrix:
    vector = np.zeros(2 ** n_qubits, dtype=complex)
    vector[0] = vector[-1] = 1.0
    return pure_state(vector)

def haar_random_state(n: int, seed: int) -> DensityMatrix:
    """Haar-random pure state from a normalised vector of complex Gaussians."""
    if n < 1:
        raise ConfigError(f"haar_random_state requires n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    dim = 2 ** n
    vector = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return pure_state(vector)

def random_density_matrix(n: int, seed: int, rank: Optional[int] = None) -> DensityMatrix:
    """Mixed state G G^dag / Tr from a complex Ginibre matrix of the given rank."""
    rng = np.random.default_rng(seed)
    dim = 2 ** n
    rank = dim if rank is None else rank
    ginibre = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    matrix = ginibre @ ginibre.conj().T
    matrix = (matrix + matrix.conj().T) / 2.0
    return DensityMatrix(n_qubits=n, matrix=matrix / np.real(np.trace(matrix)))

def evolve_state(rho: DensityMatrix, U: np.ndarray) -> DensityMatrix:
    matrix = U @ rho.matrix @ U.conj().T
    return DensityMatrix(n_qubits=rho.n_qubits, matrix=(matrix + matrix.conj().T) / 2.0)
