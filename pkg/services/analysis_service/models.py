# models.py - Pydantic models for the analysis_service
# This file defines decay fits, the empirical error model, planning requests
# and results, and fault-tolerance parameters.

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from .config import settings

class DecayFit(BaseModel):
    """Least-squares line through (d, ln value) over an inclusive step window."""
    prefactor: float
    rate: float
    r_squared: float
    window: Tuple[int, int]
    n_points: int

class FitProvenance(BaseModel):
    gammas: List[float] = Field(default_factory=list)
    window: Optional[Tuple[int, int]] = None
    steps: Optional[int] = None
    time: Optional[float] = None
    per_gamma: List[Dict[str, float]] = Field(default_factory=list)
    r_squared: Dict[str, float] = Field(default_factory=dict)
    alg_prefactor_spread: Optional[float] = None
    alg_prefactor_linear: Optional[Dict[str, float]] = None
    source_sizes: List[int] = Field(default_factory=list)
    clamped_decay: bool = False
    inputs: Dict[str, str] = Field(default_factory=dict)   # file name -> sha256

class ErrorModel(BaseModel):
    """Coefficients of the per-step model

    CγΥ e^{-cγΥd} + B (t/r)^{p+1} e^{-bγΥd}
    """
    C: float = Field(..., ge=0)
    c: float = Field(..., ge=0)
    B: float = Field(..., ge=0)
    b: float = Field(..., ge=0)
    order: int = Field(..., ge=1)
    upsilon: int = Field(..., ge=1)
    n: int = Field(..., ge=1)
    worst_case_b: Optional[float] = Field(default=None, ge=0)
    provenance: FitProvenance = Field(default_factory=FitProvenance)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ErrorModel":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))

class PlanRequest(BaseModel):
    model: ErrorModel
    t: float = Field(..., gt=0)
    epsilon: float = Field(..., gt=0)
    order: Optional[int] = None
    upsilon: Optional[int] = None

    @model_validator(mode="after")
    def _match_model(self) -> "PlanRequest":
        if self.order is not None and self.order != self.model.order:
            raise ValueError(f"order {self.order} does not match model order {self.model.order}")
        if self.upsilon is not None and self.upsilon != self.model.upsilon:
            raise ValueError(f"upsilon {self.upsilon} does not match model upsilon {self.model.upsilon}")
        return self

class FTParams(BaseModel):
    gamma0: float = Field(default_factory=lambda: settings.gamma0, gt=0)
    ratio: float = Field(default_factory=lambda: settings.physical_ratio)

    @field_validator("ratio")
    @classmethod
    def _ratio_in_unit_interval(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"physical-to-threshold ratio must lie in (0, 1), got {v}")
        return v

class ResourceEstimate(BaseModel):
    gamma_logical: float
    raw_distance: float
    d_c: int
    n_c: int

class WorstCaseInputs(BaseModel):
    """Worst-case side of a comparison: 2nγr + B t^{p+1}/r^p."""
    n: int = Field(..., ge=1)
    B_worst: float = Field(..., ge=0)
    order: Optional[int] = None

class PlanSide(BaseModel):
    r_closed: float
    r_opt: int
    gamma_star_closed: float
    gamma_star: float
    min_error: float
    resources: ResourceEstimate

    @property
    def cost(self) -> int:
        return self.r_opt * self.resources.n_c

class PlanResult(BaseModel):
    epsilon: float
    t: float
    order: int
    upsilon: int
    n: int
    state_dependent: PlanSide
    worst_case: PlanSide
    saving: float
    ft_params: FTParams
    warnings: List[str] = Field(default_factory=list)
    provenance: Dict[str, Any] = Field(default_factory=dict)

    def summary(self) -> Dict[str, Any]:
        return {
            "r_opt": self.state_dependent.r_opt,
            "gamma_star": self.state_dependent.gamma_star,
            "worst_r_opt": self.worst_case.r_opt,
            "worst_gamma_star": self.worst_case.gamma_star,
            "d_c": self.state_dependent.resources.d_c,
            "worst_d_c": self.worst_case.resources.d_c,
            "saving": self.saving,
        }

    def save(self, path: Union[str, Path]) -> None:
        payload = self.model_dump()
        payload["summary"] = self.summary()
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
