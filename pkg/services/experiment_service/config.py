# config.py - Service configuration for experiment_service
# This file contains CLI defaults, worker pool sizing and output formatting.

from typing import Optional

from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    # Service Configuration
    service_name: str = "experiment-service"
    version: str = "1.0.0"
    log_level: str = "INFO"

    # Sweep Configuration
    default_workers: Optional[int] = None  # None -> os.cpu_count()

    # Output Configuration
    float_format: str = "%.17g"
    output_dir: str = "results"

    class Config:
        env_prefix = "EXPERIMENT_SERVICE_"
        env_file = ".env"

settings = Settings()
