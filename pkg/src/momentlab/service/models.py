"""Request/response schemas for the HTTP service.

Exact integers and high-precision reals travel as decimal strings; JSON
numbers would silently truncate them.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class DeligneOut(BaseModel):
    passed: bool
    max_ratio: float
    argmax_n: int
    first_violation: Optional[int] = None


class HeckeOut(BaseModel):
    passed: bool
    coprime_pairs_checked: int
    prime_squares_checked: int
    failures: list = Field(default_factory=list)


class CoeffsRequest(BaseModel):
    weight: int = 12
    n_max: int = Field(default=1000, ge=1)
    cache_dir: Optional[str] = None
    run_deligne: bool = True
    hecke_trials: int = Field(default=0, ge=0)
    seed: int = 0


class CoeffsResponse(BaseModel):
    weight: int
    n_max: int
    rebuilt: bool
    cache_file: Optional[str] = None
    passed: bool
    deligne: Optional[DeligneOut] = None
    hecke: Optional[HeckeOut] = None


class MomentsRequest(BaseModel):
    weight: int = 12
    n_max: int = Field(ge=2)
    k: int
    t_list: list[int]
    precision_bits: int = 128
    y_used: Optional[int] = None
    raw: bool = False
    cache_dir: Optional[str] = None


class MomentsResponse(BaseModel):
    csv: str
    summary: dict


class ConstantRequest(BaseModel):
    weight: int = 12
    n_max: int = Field(ge=1)
    k: int
    l: int
    y_list: list[int]
    precision_bits: int = 128
    cache_dir: Optional[str] = None


class ConstantResponse(BaseModel):
    summary: dict


class CountRequest(BaseModel):
    lemma: str = "A1"
    box: list[int] = Field(min_length=4, max_length=4)
    deltas: list[float]
    sign: str = "-"
    alarm_threshold: float = 10.0


class CountResponse(BaseModel):
    csv: str
    alarms: int


class VoronoiRequest(BaseModel):
    weight: int = 12
    n_max: int = Field(ge=2)
    x_lo: float
    x_hi: float
    n_list: list[int]
    grid_size: int = 12
    precision_bits: int = 128
    seed: int = 0
    cache_dir: Optional[str] = None


class VoronoiResponse(BaseModel):
    csv: str
    summary: dict


class DecomposeRequest(BaseModel):
    weight: int = 12
    x: float
    y: int = Field(ge=1)
    precision_bits: int = 128
    cache_dir: Optional[str] = None


class DecomposeResponse(BaseModel):
    summary: dict
