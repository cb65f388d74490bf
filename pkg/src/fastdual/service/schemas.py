"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Family = Literal["RA", "RAD", "RDA"]
SpectralFamily = Literal["A", "AD", "DA"]


class SampleRequest(BaseModel):
    family: Family = "RDA"
    n: int = Field(ge=2)
    m: int = Field(ge=1)
    r: int = 2
    seed: int = 0
    expand: bool = False


class EncodeRequest(BaseModel):
    family: Family = "RDA"
    n: int
    m: int
    seed: int = 0
    message: str
    transposed: bool = False


class EncodeResponse(BaseModel):
    family: Family
    n: int
    m: int
    seed: int
    k: int
    message: str
    codeword: str
    weight: int


class DualCheckRequest(BaseModel):
    n: int
    m: int
    seed: int = 0


class DualCheckResponse(BaseModel):
    n: int
    m: int
    seed: int
    ok: bool
    violation: Optional[dict] = None


class DistanceRequest(BaseModel):
    family: Family = "RDA"
    n: int
    m: int
    seed: int = 0
    sampled: bool = False
    samples: int = 100_000
    threads: int = 1


class DistanceResponse(BaseModel):
    family: Family
    n: int
    m: int
    seed: int
    abs_distance: int
    rel_distance: float
    argmin_message: str
    method: Literal["exhaustive", "sampled"]
    messages_scanned: int


class FailureRateRequest(BaseModel):
    family: Family = "RDA"
    n: int
    m: int
    d: int
    trials: int = 100
    seed: int = 0


class FailureRateResponse(BaseModel):
    family: Family
    n: int
    m: int
    d: int
    trials: int
    failures: int
    p_hat: float
    wilson_low: float
    wilson_high: float


class IowefRequest(BaseModel):
    family: Family = "RDA"
    n: int
    m: int
    d: int
    h: Optional[int] = None
    seed: int = 0


class TailSplitRequest(BaseModel):
    family: Family = "RDA"
    n: int
    m: int
    d: int
    h: Optional[int] = None


class TailSplitResponse(BaseModel):
    family: Family
    n: int
    m: int
    d: int
    h: int
    star: float
    starstar: float
    total: float


class SpectralRequest(BaseModel):
    family: SpectralFamily = "A"
    m: int = Field(ge=1, le=8)
    tau: float = 0.0
    grid_step: float = Field(default=1e-3, ge=1e-5, le=1e-2)
    r: int = 2


class DeltaRequest(BaseModel):
    m: int = Field(ge=2, le=6)
    tol: float = 1e-9
    grid_check: bool = False
    grid_step: float = 1e-3


class EmvpDemoRequest(BaseModel):
    n: int
    m: int
    rows: int = 32
    seed: int = 0
    queries: int = 20


class EmvpDemoResponse(BaseModel):
    n: int
    m: int
    rows: int
    queries: int
    seed: int
    failures: list[int]
    ok: bool = Field(alias="pass")

    model_config = {"populate_by_name": True}
