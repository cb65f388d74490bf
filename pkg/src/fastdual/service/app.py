"""FastAPI service wrapping the core package.

Long-running computations (spectral tables, delta solving, distance sweeps)
are pure functions of the request body, so responses are cacheable by any
front-side proxy; the CLI offers the same operations in-process.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import ops
from . import schemas

app = FastAPI(
    title="fastdual",
    description="Rate-1/2 binary codes with fast duals: encoders, distance lab, "
    "weight-transition analysis, spectral shapes.",
    version="0.1.0",
)


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, RuntimeError) as e:
        raise HTTPException(status_code=422, detail=str(e))


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/sample")
def sample(req: schemas.SampleRequest) -> dict:
    return _run(ops.sample_spec, req.family, req.n, req.m, req.seed, r=req.r,
                expand=req.expand)


@app.post("/encode", response_model=schemas.EncodeResponse)
def encode(req: schemas.EncodeRequest):
    return _run(ops.encode_message, req.family, req.n, req.m, req.seed, req.message,
                transposed=req.transposed)


@app.post("/dual-check", response_model=schemas.DualCheckResponse)
def dual_check(req: schemas.DualCheckRequest):
    return _run(ops.dual_check, req.n, req.m, req.seed)


@app.post("/distance", response_model=schemas.DistanceResponse)
def distance(req: schemas.DistanceRequest):
    return _run(ops.distance_report, req.family, req.n, req.m, req.seed,
                sampled=req.sampled, samples=req.samples, threads=req.threads)


@app.post("/failure-rate", response_model=schemas.FailureRateResponse)
def failure_rate(req: schemas.FailureRateRequest):
    return _run(ops.failure_rate, req.family, req.n, req.m, req.d, req.trials, req.seed)


@app.post("/iowef")
def iowef(req: schemas.IowefRequest) -> dict:
    return _run(ops.iowef, req.family, req.n, req.m, req.d, h=req.h, seed=req.seed)


@app.post("/tail-split", response_model=schemas.TailSplitResponse)
def tail_split(req: schemas.TailSplitRequest):
    return _run(ops.tail_split, req.family, req.n, req.m, req.d, h=req.h)


@app.post("/spectral")
def spectral(req: schemas.SpectralRequest) -> dict:
    table = _run(ops.spectral_table, req.family, req.m, tau=req.tau,
                 grid_step=req.grid_step, r=req.r)
    return table.to_json()


@app.post("/delta")
def delta(req: schemas.DeltaRequest) -> dict:
    return _run(ops.delta, req.m, tol=req.tol, grid_check=req.grid_check,
                grid_step=req.grid_step)


@app.post("/emvp-demo", response_model=schemas.EmvpDemoResponse)
def emvp_demo(req: schemas.EmvpDemoRequest):
    return _run(ops.emvp_demo, req.n, req.m, req.rows, req.seed, queries=req.queries)


@app.post("/verify-bounds")
def verify_bounds() -> list[dict]:
    return _run(ops.verify_bounds)
