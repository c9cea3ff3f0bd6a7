# config.py - Service configuration for analysis_service
# This file contains grid requirements, search brackets and fault-tolerance constants.

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Service Configuration
    service_name: str = "analysis-service"
    log_level: str = "INFO"

    # Fitting
    min_grid_points: int = 3
    clamp_decay_default: bool = True
    clamped_decay_value: float = 0.5

    # Noise-rate search
    gamma_bracket_low: float = 1e-12
    gamma_bracket_high: float = 1.0
    gamma_search_rtol: float = 1e-6
    gamma_monotonicity_points: int = 64

    # Integer Trotter-number search
    r_scan_factor: int = 10
    max_r_scan: int = 1_000_000

    # Surface-code resources
    gamma0: float = 0.02985
    physical_ratio: float = 0.5
    distance_rounding_tol: float = 1e-9

    class Config:
        env_prefix = "ANALYSIS_SERVICE_"
        env_file = ".env"

settings = Settings()
