"""HTTP front end: one endpoint per service operation."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import ConfigError, DomainError
from . import handlers
from .schemas import (
    BinomialEvalRequest,
    BoundReport,
    PoissonEvalRequest,
    SweepRequest,
    SweepResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(title="tailbounds", version=__version__)


@app.get("/")
def index() -> dict:
    return {
        "name": "tailbounds",
        "version": __version__,
        "endpoints": ["/eval/binomial", "/eval/poisson", "/sweep/binomial", "/verify"],
    }


@app.post("/eval/binomial", response_model=BoundReport)
def eval_binomial(req: BinomialEvalRequest) -> BoundReport:
    try:
        return handlers.evaluate_binomial(req)
    except DomainError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/eval/poisson", response_model=BoundReport)
def eval_poisson(req: PoissonEvalRequest) -> BoundReport:
    try:
        return handlers.evaluate_poisson(req)
    except DomainError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/sweep/binomial", response_model=SweepResponse)
def sweep_binomial(req: SweepRequest) -> SweepResponse:
    try:
        return handlers.sweep_binomial(req)
    except DomainError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest) -> VerifyResponse:
    try:
        return handlers.run_verification(req)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
