# config.py - Service configuration for simulation_service
# This file contains numerical tolerances and size limits for the dense simulator.

from enum import Enum
from typing import Dict

from pydantic_settings import BaseSettings


class UpsilonConvention(str, Enum):
    UNMERGED = "unmerged"    # Υ1=2, Υ2=4, Υp=2·5^(p/2-1) for p>=4
    MERGED = "merged"        # Υp=2·5^(p/2-1) for every even p, Υ1=2


class Settings(BaseSettings):
    # Service Configuration
    service_name: str = "simulation-service"
    log_level: str = "INFO"

    # Tolerances
    hermitian_tol: float = 1e-12
    state_tol: float = 1e-10
    entropy_clamp: float = 1e-14

    # Dense size limits (qubits)
    max_dense_qubits: int = 12
    max_validation_qubits: int = 12
    max_commutator_qubits: int = 10
    max_psd_check_qubits: int = 10
    streaming_threshold_qubits: int = 8

    # Product formula layer count
    upsilon_convention: UpsilonConvention = UpsilonConvention.UNMERGED
    upsilon_overrides: Dict[int, int] = {}

    # Decay-fit burn-in
    burn_in_min_steps: int = 5
    burn_in_fraction: float = 0.1

    class Config:
        env_prefix = "SIMULATION_SERVICE_"
        env_file = ".env"

settings = Settings()
