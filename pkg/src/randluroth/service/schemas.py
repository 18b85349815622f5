"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class ExpandRequest(BaseModel):
    c: str = "0"
    x: str
    omega: str
    steps: int = Field(10, ge=1)


class ExpandResponse(BaseModel):
    c: str
    x: str
    omega_used: List[int]
    digits: List[List[int]]
    orbit: List[str]
    convergents: List[List[int]]
    thetas: List[str]
    psi_prefix: str
    identity_ok: bool


class ClassifyRequest(BaseModel):
    c: str
    x: str
    emit_graph: bool = False
    max_count: int = Field(10, ge=1)
    max_period: int = Field(10, ge=1)


class ClassifyResponse(BaseModel):
    c: str
    x: str
    classification: str = Field(alias="class")
    witness_cycle: Optional[List[str]] = None
    witness_node: Optional[str] = None
    witness_loops: Optional[List[Dict]] = None
    loops_per_node: Optional[Dict[str, List[List[int]]]] = None
    expansions: Optional[List[Dict]] = None
    dot: Optional[str] = None

    model_config = {"populate_by_name": True}


class MarkovRequest(BaseModel):
    c: str
    cap: int = Field(10_000, ge=1)


class MarkovResponse(BaseModel):
    c: str
    breakpoints: List[str]
    provenance: List[str]


class DensityRequest(BaseModel):
    c: str
    p: str = "1/2"
    eval_x: Optional[str] = None


class DensityResponse(BaseModel):
    c: str
    p: str
    breakpoints: List[str]
    values: List[str]
    merged: bool
    eval: Optional[Dict[str, str]] = None


class SimRequest(BaseModel):
    c: str = "0"
    p: str = "1/2"
    steps: int = Field(1000, ge=1)
    trajectories: int = Field(100, ge=1)
    seed: int = 0
    x0: Optional[str] = None


class StatReportModel(BaseModel):
    estimate: float
    std_error: float
    n_samples: int
    seed: int
    reference: Optional[float] = None


class ThetaStatsRequest(SimRequest):
    grid: Optional[List[float]] = None


class ThetaStatsResponse(BaseModel):
    mean: StatReportModel
    cdf: List[Dict]
    sup_distance: Optional[float] = None


class FreqRequest(SimRequest):
    max_digit: int = Field(20, ge=2)


class FreqResponse(BaseModel):
    n_samples: int
    seed: int
    overflow: int
    digit: List[Dict]
    sign_digit: List[Dict]


class SimulateResponse(BaseModel):
    seed: int
    n_steps: int
    n_trajectories: int
    rows: List[Dict]


class CoverageRequest(SimRequest):
    block_len: int = Field(3, ge=1)
    digit_cutoff: Optional[int] = None


class CoverageResponse(BaseModel):
    alphabet_size: int
    block_len: int
    n_blocks: int
    n_observed_blocks: int
    n_windows: int
    seed: int
    missing: List[List[List[int]]]
    counts: Optional[List[int]] = None


class HittingRequest(BaseModel):
    c: str
    p: str = "1/2"
    trajectories: int = Field(1000, ge=1)
    seed: int = 0
    max_steps: int = Field(1000, ge=1)
    x0: Optional[str] = None


class HittingResponse(BaseModel):
    n_trajectories: int
    max_steps: int
    seed: int
    n_failures: int
    mean_time: Optional[float] = None
    histogram: List[int]
