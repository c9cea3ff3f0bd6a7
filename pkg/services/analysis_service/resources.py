# resources.py - Surface-code resource estimates
# This file converts a required logical error rate into a code distance and
# physical-qubit count for the surface code.

import logging
import math
from typing import Optional

from shared.utils.errors import ConfigError
from .config import settings
from .models import FTParams, ResourceEstimate

logger = logging.getLogger(__name__)

def ft_resources(gamma_logical: float, params: Optional[FTParams] = None) -> ResourceEstimate:
    """Smallest odd distance d_c with γ0·ratio^{d_c/2} <= γ_L, and N_c = d_c²."""
    params = FTParams() if params is None else params
    if not 0.0 < gamma_logical < params.gamma0:
        raise ConfigError(
            f"logical rate must lie in (0, gamma0={params.gamma0}), got {gamma_logical}"
        )
    raw = 2.0 * math.log(gamma_logical / params.gamma0) / math.log(params.ratio)
    distance = max(1, math.ceil(raw - settings.distance_rounding_tol))
    if distance % 2 == 0:
        distance += 1
    logger.debug(f"gamma_L={gamma_logical:.6g}: raw distance {raw:.6f} -> d_c={distance}")
    return ResourceEstimate(gamma_logical=gamma_logical, raw_distance=raw, d_c=distance, n_c=distance ** 2)
