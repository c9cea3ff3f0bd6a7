# planner.py - Optimal Trotter numbers, noise-rate requirements and phase diagrams
# This file evaluates the empirical accumulated-error model and its worst-case
# counterpart, solves for r_opt and γ* in closed form and numerically, and
# compares state-dependent against worst-case resource plans.

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from shared.utils.errors import ConfigError, NoFiniteOptimumError, UnreachablePrecisionError
from .config import settings
from .models import ErrorModel, FTParams, PlanResult, PlanSide, WorstCaseInputs
from .resources import ft_resources

logger = logging.getLogger(__name__)

ArrayLike = Union[int, float, np.ndarray]

PHASE_COLUMNS = ["gamma", "r", "acc_model", "acc_worst", "reduction"]

# Model evaluation

def _geometric_sum(a: float, r: np.ndarray) -> np.ndarray:
    """sum_{d=1}^r e^{-a d} for a >= 0."""
    if a == 0.0:
        return r.astype(float)
    return -np.expm1(-a * r) / np.expm1(a)

def model_accumulated_error(model: ErrorModel, gamma: float, r: ArrayLike, t: float) -> ArrayLike:
    """Σ_d CγΥ e^{-cγΥd} + B (t/r)^{p+1} e^{-bγΥd} by closed-form geometric sums."""
    if gamma < 0:
        raise ConfigError(f"gamma must be non-negative, got {gamma}")
    r_values = np.asarray(r)
    if np.any(r_values < 1):
        raise ConfigError("Trotter number r must be >= 1")
    p, upsilon = model.order, model.upsilon
    physical = model.C * gamma * upsilon * _geometric_sum(model.c * gamma * upsilon, r_values)
    algorithmic = model.B * (t / r_values) ** (p + 1) * _geometric_sum(model.b * gamma * upsilon, r_values)
    total = physical + algorithmic
    return float(total) if np.ndim(total) == 0 else total

def worst_case_accumulated_error(n: int, gamma: float, r: ArrayLike, t: float, B: float, p: int = 2) -> ArrayLike:
    """2nγr + B t^{p+1}/r^p."""
    r_values = np.asarray(r, dtype=float)
    total = 2.0 * n * gamma * r_values + B * t ** (p + 1) / r_values ** p
    return float(total) if np.ndim(total) == 0 else total

def d_error_d_gamma(model: ErrorModel, gamma: float, r: int, t: float) -> float:
    """Analytic ∂/∂γ of the summand form of the model."""
    p, upsilon = model.order, model.upsilon
    d = np.arange(1, int(r) + 1, dtype=float)
    physical = model.C * upsilon * (1.0 - model.c * gamma * upsilon * d) * np.exp(-model.c * gamma * upsilon * d)
    algorithmic = model.B * model.b * upsilon * d * (t / r) ** (p + 1) * np.exp(-model.b * gamma * upsilon * d)
    return float(np.sum(physical - algorithmic))

# Optimal Trotter number

def _integer_argmin(objective: Callable[[np.ndarray], np.ndarray], r_closed: float) -> int:
    """Smallest minimiser over [1, factor·r_closed] plus the neighbours of r_closed."""
    upper = int(math.floor(settings.r_scan_factor * r_closed))
    near = np.arange(max(1, math.floor(r_closed) - 1), math.ceil(r_closed) + 2)
    if upper <= settings.max_r_scan:
        candidates = np.union1d(np.arange(1, max(upper, 1) + 1), near)
        values = objective(candidates)
        return int(candidates[int(np.argmin(values))])
    logger.debug(f"Scan window {upper} above {settings.max_r_scan}, using local descent")
    best = int(near[int(np.argmin(objective(near)))])
    best_value = float(objective(np.array([best]))[0])
    for step in (-1, 1):
        while best + step >= 1:
            value = float(objective(np.array([best + step]))[0])
            if value >= best_value:
                break
            best, best_value = best + step, value
    return best

def optimal_r(model: ErrorModel, gamma: float, t: float) -> Tuple[float, int]:
    """Closed-form (pB/(CγΥ))^{1/(p+1)} t and the integer minimiser of the model."""
    if gamma <= 0:
        raise NoFiniteOptimumError("at gamma = 0 the model error decreases without bound in r")
    if model.C == 0:
        raise NoFiniteOptimumError("C = 0: the physical error never penalises more steps")
    p = model.order
    r_closed = (p * model.B / (model.C * gamma * model.upsilon)) ** (1.0 / (p + 1)) * t
    r_int = _integer_argmin(lambda r: np.asarray(model_accumulated_error(model, gamma, r, t)), r_closed)
    return r_closed, r_int

def worst_case_optimal_r(n: int, gamma: float, t: float, B: float, p: int = 2) -> Tuple[float, int]:
    """Minimiser of 2nγr + B t^{p+1}/r^p in closed form and over the integers."""
    if gamma <= 0:
        raise NoFiniteOptimumError("at gamma = 0 the worst-case error decreases without bound in r")
    r_closed = (p * B * t ** (p + 1) / (2.0 * n * gamma)) ** (1.0 / (p + 1))
    # convex in r, so the integer minimiser is a neighbour of r_closed
    candidates = np.arange(max(1, math.floor(r_closed)), math.ceil(r_closed) + 1)
    values = worst_case_accumulated_error(n, gamma, candidates, t, B, p)
    return r_closed, int(candidates[int(np.argmin(np.atleast_1d(values)))])

# Noise-rate requirement

def _bisect_gamma(
    objective: Callable[[float], float], epsilon: float, what: str, notes: Optional[List[str]] = None
) -> float:
    """Largest γ below the first crossing of objective(γ) = ε, bisected in log space.

    Beyond the first crossing the minimal error may fall again as the decay
    terms take over; that region is ignored. A non-monotone profile below the
    crossing is logged and appended to `notes`.
    """
    low, high = settings.gamma_bracket_low, settings.gamma_bracket_high
    grid = np.geomspace(low, high, settings.gamma_monotonicity_points)
    profile = np.array([objective(g) for g in grid])
    if profile[0] > epsilon:
        raise UnreachablePrecisionError(
            f"{what}: even gamma={low:g} gives minimal error {profile[0]:.6g} > epsilon={epsilon:g}"
        )
    exceeded = profile > epsilon
    if not exceeded.any():
        return high
    crossing = int(np.argmax(exceeded))
    below = profile[:crossing + 1]
    if np.any(np.diff(below) < -1e-12 * np.abs(below[1:])):
        message = f"{what}: minimal error is not monotone in gamma below {grid[crossing]:.3g}"
        logger.warning(message)
        if notes is not None:
            notes.append(message)
    low, high = grid[crossing - 1], grid[crossing]
    while high / low - 1.0 > settings.gamma_search_rtol:
        middle = math.sqrt(low * high)
        if objective(middle) <= epsilon:
            low = middle
        else:
            high = middle
    return low

def _minimal_error(model: ErrorModel, gamma: float, t: float) -> float:
    if model.C == 0:
        # physical term absent, error decreases monotonically in r
        return 0.0
    _, r_int = optimal_r(model, gamma, t)
    return float(model_accumulated_error(model, gamma, r_int, t))

def gamma_star(
    model: ErrorModel, epsilon: float, t: float, notes: Optional[List[str]] = None
) -> Tuple[float, float]:
    """Closed-form and searched largest γ whose minimal model error meets ε."""
    if epsilon <= 0 or t <= 0:
        raise ConfigError(f"epsilon and t must be positive, got epsilon={epsilon}, t={t}")
    p, upsilon = model.order, model.upsilon
    if model.C == 0 or model.B == 0:
        closed = math.inf
    else:
        closed = (
            (epsilon / t) ** (1.0 + 1.0 / p) * p
            / (model.C * model.B ** (1.0 / p) * upsilon * (p + 1) ** (1.0 + 1.0 / p))
        )
    searched = _bisect_gamma(lambda g: _minimal_error(model, g, t), epsilon, "gamma_star", notes)
    logger.info(f"gamma* for epsilon={epsilon}, t={t}: closed={closed:.6g}, searched={searched:.6g}")
    return closed, searched

def worst_case_gamma_star(
    n: int, epsilon: float, t: float, B: float, p: int = 2, notes: Optional[List[str]] = None
) -> Tuple[float, float]:
    """Closed form (p/(2n)) (ε/((p+1) B^{1/(p+1)} t))^{(p+1)/p} and its bisection counterpart."""
    if epsilon <= 0 or t <= 0:
        raise ConfigError(f"epsilon and t must be positive, got epsilon={epsilon}, t={t}")
    if B == 0:
        closed = epsilon / (2.0 * n)
    else:
        closed = (p / (2.0 * n)) * (epsilon / ((p + 1) * B ** (1.0 / (p + 1)) * t)) ** ((p + 1) / p)

    def minimal(gamma: float) -> float:
        _, r_int = worst_case_optimal_r(n, gamma, t, B, p)
        return float(worst_case_accumulated_error(n, gamma, r_int, t, B, p))

    searched = _bisect_gamma(minimal, epsilon, "worst_case_gamma_star", notes)
    return closed, searched

# Grids

def phase_diagram(
    model: ErrorModel, gamma_grid: Sequence[float], r_grid: Sequence[int], t: float,
    n: Optional[int] = None, B_worst: Optional[float] = None,
) -> pd.DataFrame:
    """Model and worst-case accumulated error on a (γ, r) grid, γ-major."""
    if len(gamma_grid) == 0 or len(r_grid) == 0:
        raise ConfigError("phase_diagram needs nonempty gamma and r grids")
    n = model.n if n is None else n
    B_worst = _worst_prefactor(model) if B_worst is None else B_worst
    r_values = np.asarray(r_grid, dtype=int)
    rows: List[pd.DataFrame] = []
    for gamma in gamma_grid:
        acc_model = np.atleast_1d(model_accumulated_error(model, float(gamma), r_values, t))
        acc_worst = np.atleast_1d(worst_case_accumulated_error(n, float(gamma), r_values, t, B_worst, model.order))
        with np.errstate(divide="ignore", invalid="ignore"):
            reduction = np.where(acc_worst > 0, 1.0 - acc_model / acc_worst, np.nan)
        rows.append(pd.DataFrame({
            "gamma": float(gamma), "r": r_values, "acc_model": acc_model,
            "acc_worst": acc_worst, "reduction": reduction,
        }))
    return pd.concat(rows, ignore_index=True)[PHASE_COLUMNS]

def derivative_map(model: ErrorModel, gamma_grid: Sequence[float], r_grid: Sequence[int], t: float) -> pd.DataFrame:
    records = [
        {"gamma": float(gamma), "r": int(r), "d_error_d_gamma": d_error_d_gamma(model, float(gamma), int(r), t)}
        for gamma in gamma_grid for r in r_grid
    ]
    return pd.DataFrame(records, columns=["gamma", "r", "d_error_d_gamma"])

def _worst_prefactor(model: ErrorModel) -> float:
    if model.worst_case_b is None:
        raise ConfigError("model carries no worst-case prefactor; pass B_worst explicitly")
    return model.worst_case_b

# Comparison

def assumption_warnings(model: ErrorModel) -> List[str]:
    """Conditions c < C and b ≈ c under which the closed forms are derived."""
    warnings = []
    if model.c >= model.C:
        warnings.append(f"decay c={model.c:.6g} is not below prefactor C={model.C:.6g}")
    if max(model.b, model.c) > 0 and abs(model.b - model.c) > 0.5 * max(model.b, model.c):
        warnings.append(f"decay rates b={model.b:.6g} and c={model.c:.6g} differ by more than 50%")
    for message in warnings:
        logger.warning(f"Closed-form assumption unmet: {message}")
    return warnings

def _model_side(model: ErrorModel, epsilon: float, t: float, params: FTParams, notes: List[str]) -> PlanSide:
    closed, searched = gamma_star(model, epsilon, t, notes)
    r_closed, r_opt = optimal_r(model, searched, t)
    return PlanSide(
        r_closed=r_closed, r_opt=r_opt, gamma_star_closed=closed, gamma_star=searched,
        min_error=float(model_accumulated_error(model, searched, r_opt, t)),
        resources=ft_resources(searched, params),
    )

def _worst_side(
    inputs: WorstCaseInputs, order: int, epsilon: float, t: float, params: FTParams, notes: List[str]
) -> PlanSide:
    p = inputs.order or order
    closed, searched = worst_case_gamma_star(inputs.n, epsilon, t, inputs.B_worst, p, notes)
    r_closed, r_opt = worst_case_optimal_r(inputs.n, searched, t, inputs.B_worst, p)
    return PlanSide(
        r_closed=r_closed, r_opt=r_opt, gamma_star_closed=closed, gamma_star=searched,
        min_error=float(worst_case_accumulated_error(inputs.n, searched, r_opt, t, inputs.B_worst, p)),
        resources=ft_resources(searched, params),
    )

def plan_comparison(
    model: ErrorModel, worst: Union[WorstCaseInputs, ErrorModel], epsilon: float, t: float,
    params: Optional[FTParams] = None,
) -> PlanResult:
    """State-dependent versus worst-case plan and the saving in r·N_c."""
    params = FTParams() if params is None else params
    warnings = assumption_warnings(model)
    state_side = _model_side(model, epsilon, t, params, warnings)
    if isinstance(worst, ErrorModel):
        worst_side = _model_side(worst, epsilon, t, params, warnings)
    else:
        worst_side = _worst_side(worst, model.order, epsilon, t, params, warnings)
    saving = 1.0 - state_side.cost / worst_side.cost
    logger.info(
        f"Plan n={model.n}, epsilon={epsilon}, t={t}: (r={state_side.r_opt}, gamma*={state_side.gamma_star:.3g}) "
        f"vs worst (r={worst_side.r_opt}, gamma*={worst_side.gamma_star:.3g}), saving {saving:.1%}"
    )
    return PlanResult(
        epsilon=epsilon, t=t, order=model.order, upsilon=model.upsilon, n=model.n,
        state_dependent=state_side, worst_case=worst_side, saving=saving,
        ft_params=params, warnings=warnings,
    )
