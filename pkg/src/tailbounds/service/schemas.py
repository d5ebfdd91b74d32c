"""Pydantic request/response models for the service and CLI."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class BinomialEvalRequest(BaseModel):
    n: int = Field(ge=1)
    p: float = Field(gt=0.0, lt=1.0)
    k: int


class PoissonEvalRequest(BaseModel):
    mu: float = Field(gt=0.0)
    k: int = Field(ge=0)
    chernoff_plus_mu: bool = False


class Query(BaseModel):
    dist: Literal["binomial", "poisson"]
    n: Optional[int] = None
    p: Optional[float] = None
    mu: Optional[float] = None
    k: int


class ExactValues(BaseModel):
    sf: float
    log_sf: float
    tce: float


class ReportMeta(BaseModel):
    precision: int = 12
    out_of_domain: list[str] = Field(default_factory=list)
    anomalies: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


class BoundReport(BaseModel):
    """One bound-evaluation report: exact values, every bound or an
    out-of-domain marker, and the threshold indices."""

    query: Query
    exact: ExactValues
    bounds: dict[str, Optional[int | float]]
    meta: ReportMeta


class SweepRequest(BaseModel):
    n: int = Field(ge=1)
    k: int = Field(ge=1)
    p_min: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    p_max: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    step: Optional[float] = Field(default=None, gt=0.0)
    figure_exponent: bool = False


class SweepRow(BaseModel):
    p: float
    exact_sf: float
    chernoff_upper: float
    factorial_upper: float
    ash_lower: float
    pelekis_lower: float
    delta: float


SWEEP_HEADER = (
    "p",
    "exact_sf",
    "chernoff_upper",
    "factorial_upper",
    "ash_lower",
    "pelekis_lower",
    "delta",
)


class SweepResponse(BaseModel):
    n: int
    k: int
    figure_exponent: bool
    header: list[str] = Field(default_factory=lambda: list(SWEEP_HEADER))
    rows: list[SweepRow]


class VerifyRequest(BaseModel):
    config: Optional[str] = None  # raw config document; None runs the shipped grid


class VerdictModel(BaseModel):
    inequality_id: str
    grid_size: int
    violations: int
    worst_margin: float
    worst_point: list
    tolerance: float
    skipped: int


class VerifyResponse(BaseModel):
    all_passed: bool
    verdicts: list[VerdictModel]
