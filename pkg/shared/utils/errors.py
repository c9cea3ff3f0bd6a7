# errors.py - Exception hierarchy shared by all services
# This file defines the error classes that map onto CLI exit codes.

from typing import Optional


class NoisyTrotterError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigError(NoisyTrotterError, ValueError):
    """Invalid input, parameter or configuration."""


class SizeLimitError(ConfigError):
    """Dense representation would exceed the configured qubit limit."""

    def __init__(self, what: str, n_qubits: int, limit: int):
        self.n_qubits = n_qubits
        self.limit = limit
        super().__init__(f"{what}: n={n_qubits} exceeds dense limit of {limit} qubits")


class HamiltonianFormatError(ConfigError):
    """A Hamiltonian file could not be ingested."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        message = reason if not detail else f"{reason}: {detail}"
        super().__init__(message)


class NumericFailure(NoisyTrotterError, ArithmeticError):
    """A computation could not produce a meaningful number."""


class FitError(NumericFailure, ValueError):
    """Fitting input violates the model's domain."""

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        super().__init__(message)


class NoFiniteOptimumError(NumericFailure):
    """The accumulated-error model has no finite minimiser."""


class UnreachablePrecisionError(NumericFailure):
    """No noise rate in the search bracket meets the target precision."""
