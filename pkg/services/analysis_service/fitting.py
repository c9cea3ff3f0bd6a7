# fitting.py - Empirical error-model extraction
# This file fits exponential decays to per-step error series, regresses the
# per-γ coefficients into an ErrorModel and extrapolates models in system size.

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from shared.utils.errors import ConfigError, FitError
from services.simulation_service.metrics import decay_fit_window
from services.simulation_service.models import ErrorTrace
from services.simulation_service.trotter import layer_count
from .config import settings
from .models import DecayFit, ErrorModel, FitProvenance

logger = logging.getLogger(__name__)

def _line_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    """slope, intercept and centred R² of y ~ slope x + intercept."""
    A = np.vstack([x, np.ones_like(x)]).T
    slope, intercept = np.linalg.lstsq(A, y, rcond=None)[0]
    residual = y - (slope * x + intercept)
    ss_res = float(np.sum(residual ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot <= 1e-300 else max(1.0 - ss_res / ss_tot, 0.0)
    return float(slope), float(intercept), r_squared

def _origin_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    """slope and uncentred R² of y ~ slope x."""
    slope = float(np.linalg.lstsq(x[:, None], y, rcond=None)[0][0])
    ss_res = float(np.sum((y - slope * x) ** 2))
    ss_tot = float(np.sum(y ** 2))
    r_squared = 1.0 if ss_tot <= 1e-300 else max(1.0 - ss_res / ss_tot, 0.0)
    return slope, r_squared

def fit_exponential_decay(series: Sequence[float], window: Optional[Tuple[int, int]] = None) -> DecayFit:
    """Fit value_d = prefactor * exp(-rate * d) on the inclusive 1-based window."""
    values = np.asarray(series, dtype=float)
    start, end = (1, len(values)) if window is None else window
    if not 1 <= start <= end <= len(values):
        raise ConfigError(f"fit window {window} invalid for a series of {len(values)} steps")
    if end - start < 1:
        raise ConfigError(f"fit window {(start, end)} needs at least two points")
    steps = np.arange(start, end + 1, dtype=float)
    chunk = values[start - 1:end]
    bad = np.flatnonzero(~(chunk > 0))
    if bad.size:
        index = int(steps[bad[0]])
        raise FitError(f"non-positive value {chunk[bad[0]]!r} at step {index}", index=index)
    slope, intercept, r_squared = _line_fit(steps, np.log(chunk))
    return DecayFit(
        prefactor=math.exp(intercept), rate=-slope, r_squared=r_squared,
        window=(start, end), n_points=len(chunk),
    )

def fit_trace_decay(trace: ErrorTrace, window: Optional[Tuple[int, int]] = None) -> Tuple[DecayFit, DecayFit]:
    """Physical and algorithmic decay fits of one trace, past burn-in by default."""
    window = decay_fit_window(trace.steps) if window is None else window
    return (
        fit_exponential_decay(trace.series("phys_err"), window),
        fit_exponential_decay(trace.series("alg_err"), window),
    )

def _non_negative(name: str, value: float) -> float:
    if value < 0:
        logger.warning(f"Fitted {name} = {value:.6g} is negative, clamping to 0")
        return 0.0
    return value

def fit_model_coefficients(
    traces: Sequence[ErrorTrace],
    gammas: Optional[Sequence[float]] = None,
    order: Optional[int] = None,
    upsilon: Optional[int] = None,
    t: Optional[float] = None,
    n: Optional[int] = None,
    window: Optional[Tuple[int, int]] = None,
) -> ErrorModel:
    """Per-γ decay fits regressed into (C, c, B, b).

    Physical prefactor CΥγ and both decay rates cΥγ, bΥγ are regressed
    through the origin; the algorithmic prefactor B (t/r)^{p+1} is taken as
    the mean over γ with its spread and a linear-in-γ fit recorded.
    Unspecified parameters are read from the traces' configs.
    """
    if not traces:
        raise ConfigError("fit_model_coefficients needs at least one trace")
    configs = [trace.config for trace in traces]
    if gammas is None:
        if any(config is None for config in configs):
            raise ConfigError("gammas must be given for traces without a config")
        gammas = [config.noise.gamma for config in configs]
    gammas = [float(g) for g in gammas]
    if len(gammas) != len(traces):
        raise ConfigError(f"{len(gammas)} gammas for {len(traces)} traces")
    if len(set(gammas)) < settings.min_grid_points:
        raise ConfigError(
            f"need at least {settings.min_grid_points} distinct gamma values, got {sorted(set(gammas))}"
        )
    if min(gammas) <= 0:
        raise ConfigError("gamma grid must be strictly positive for regression through the origin")

    reference = configs[0]
    order = order if order is not None else (reference.order if reference else None)
    t = t if t is not None else (reference.time if reference else None)
    n = n if n is not None else (_qubits_from_label(reference.hamiltonian_label) if reference else None)
    if order is None or t is None or n is None:
        raise ConfigError("order, t and n must be given or recoverable from trace configs")
    upsilon = layer_count(order) if upsilon is None else upsilon
    steps = {trace.steps for trace in traces}
    if len(steps) != 1:
        raise ConfigError(f"traces have differing step counts {sorted(steps)}")
    r = steps.pop()
    window = decay_fit_window(r) if window is None else window

    per_gamma: List[Dict[str, float]] = []
    for gamma, trace in zip(gammas, traces):
        phys, alg = fit_trace_decay(trace, window)
        per_gamma.append({
            "gamma": gamma,
            "phys_prefactor": phys.prefactor, "phys_rate": phys.rate, "phys_r2": phys.r_squared,
            "alg_prefactor": alg.prefactor, "alg_rate": alg.rate, "alg_r2": alg.r_squared,
        })
    x = np.array(gammas)
    column = lambda key: np.array([row[key] for row in per_gamma])

    phys_slope, phys_r2 = _origin_fit(x, column("phys_prefactor"))
    phys_rate_slope, phys_rate_r2 = _origin_fit(x, column("phys_rate"))
    alg_rate_slope, alg_rate_r2 = _origin_fit(x, column("alg_rate"))
    alg_prefactors = column("alg_prefactor")
    step_scale = (t / r) ** (order + 1)
    mean_alg = float(alg_prefactors.mean())
    spread = float((alg_prefactors.max() - alg_prefactors.min()) / mean_alg) if mean_alg > 0 else math.inf
    lin_slope, lin_intercept, lin_r2 = _line_fit(x, alg_prefactors)

    model = ErrorModel(
        C=_non_negative("C", phys_slope / upsilon),
        c=_non_negative("c", phys_rate_slope / upsilon),
        B=_non_negative("B", mean_alg / step_scale),
        b=_non_negative("b", alg_rate_slope / upsilon),
        order=order, upsilon=upsilon, n=n,
        provenance=FitProvenance(
            gammas=gammas, window=window, steps=r, time=t, per_gamma=per_gamma,
            r_squared={
                "phys_prefactor": phys_r2, "phys_rate": phys_rate_r2, "alg_rate": alg_rate_r2,
                "min_phys_decay": float(column("phys_r2").min()),
                "min_alg_decay": float(column("alg_r2").min()),
            },
            alg_prefactor_spread=spread,
            alg_prefactor_linear={"slope": lin_slope, "intercept": lin_intercept, "r_squared": lin_r2},
        ),
    )
    logger.info(
        f"Fitted n={n}, p={order}: C={model.C:.6g}, c={model.c:.6g}, B={model.B:.6g}, b={model.b:.6g} "
        f"(alg prefactor spread {spread:.1%})"
    )
    return model

def _qubits_from_label(label: str) -> Optional[int]:
    # builder labels carry "n=<qubits>" or "sites=<sites>"
    for key, factor in (("n=", 1), ("sites=", 2)):
        if key in label:
            digits = label.split(key, 1)[1].split(",")[0].split(")")[0]
            if digits.isdigit():
                return int(digits) * factor
    return None

def extrapolate_in_n(
    models: Sequence[ErrorModel], target_n: int, clamp_decay: Optional[bool] = None
) -> ErrorModel:
    """Linear fits of C(n), B(n) (and worst-case B(n) when present) evaluated at target_n."""
    clamp_decay = settings.clamp_decay_default if clamp_decay is None else clamp_decay
    sizes = [model.n for model in models]
    if len(set(sizes)) < settings.min_grid_points:
        raise ConfigError(f"need at least {settings.min_grid_points} distinct sizes, got {sorted(set(sizes))}")
    orders = {model.order for model in models}
    upsilons = {model.upsilon for model in models}
    if len(orders) != 1 or len(upsilons) != 1:
        raise ConfigError(f"models mix orders {sorted(orders)} or layer counts {sorted(upsilons)}")

    x = np.array(sizes, dtype=float)
    r_squared: Dict[str, float] = {}

    def extrapolate(name: str, values: Sequence[float]) -> float:
        slope, intercept, r2 = _line_fit(x, np.asarray(values, dtype=float))
        r_squared[name] = r2
        return _non_negative(name, slope * target_n + intercept)

    C = extrapolate("C", [model.C for model in models])
    B = extrapolate("B", [model.B for model in models])
    worst_case_b = None
    if all(model.worst_case_b is not None for model in models):
        worst_case_b = extrapolate("worst_case_b", [model.worst_case_b for model in models])
    if clamp_decay:
        c = b = settings.clamped_decay_value
    else:
        c = float(np.mean([model.c for model in models]))
        b = float(np.mean([model.b for model in models]))

    result = ErrorModel(
        C=C, c=c, B=B, b=b, order=orders.pop(), upsilon=upsilons.pop(), n=target_n,
        worst_case_b=worst_case_b,
        provenance=FitProvenance(source_sizes=sorted(sizes), r_squared=r_squared, clamped_decay=clamp_decay),
    )
    logger.info(f"Extrapolated to n={target_n}: C={C:.6g}, B={B:.6g}, c={c:.6g}, b={b:.6g}")
    return result
