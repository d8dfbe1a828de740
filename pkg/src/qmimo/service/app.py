"""HTTP service exposing quantizer design, rate evaluation, and experiment runs."""

from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import ValidationError

from .. import experiments, quantizer, validation
from ..channel import CellModel, betas_of, drop_users
from ..experiments import ResultTable, csv_text
from ..quantizer import ConvergenceError
from ..rates import evaluate_rate_point
from .schemas import (
    CheckOut,
    QuantizerDesignRequest,
    QuantizerSpecOut,
    RatePointOut,
    RateRequest,
    ResultTableOut,
    RhoOut,
    ScenarioOverrides,
    SweepRequest,
    ValidateRequest,
    ValidateResponse,
    bits_to_wire,
)


def _table_response(table: ResultTable, fmt: str):
    if fmt == "csv":
        return PlainTextResponse(csv_text(table), media_type="text/csv")
    return ResultTableOut.from_table(table)


def create_app() -> FastAPI:
    app = FastAPI(title="qmimo", version="0.1.0")

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValidationError)
    async def _validation_error(_request: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ConvergenceError)
    async def _convergence_error(_request: Request, exc: ConvergenceError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/quantizer/rho", response_model=RhoOut)
    def quantizer_rho(
        bits: str = Query(...),
        mode: Literal["table", "lloyd-max"] = "table",
    ):
        parsed = experiments.parse_bits(bits)
        rho = quantizer.rho_of_bits(parsed, mode)
        return RhoOut(bits=bits_to_wire(parsed), rho=rho, alpha=1.0 - rho, mode=mode)

    @app.post("/quantizer/design", response_model=QuantizerSpecOut)
    def quantizer_design(req: QuantizerDesignRequest):
        if req.bits == quantizer.INFINITE:
            return QuantizerSpecOut.from_spec(quantizer.infinite_resolution_spec())
        spec = quantizer.design_lloyd_max(req.bits, req.tolerance, req.max_iterations)
        return QuantizerSpecOut.from_spec(spec)

    @app.post("/rate", response_model=RatePointOut)
    def rate(req: RateRequest):
        if req.betas is not None:
            betas = list(req.betas)
        else:
            drops = drop_users(CellModel(), req.n_users, req.drop_seed)
            betas = [float(b) for b in betas_of(drops)]
        alpha = quantizer.alpha_of_bits(req.bits, req.mode)
        p_u = req.p_u()
        point = evaluate_rate_point(betas, req.m_antennas, p_u, alpha, req.trials, req.seed)
        return RatePointOut.from_point(
            point,
            m_antennas=req.m_antennas,
            bits=req.bits,
            alpha=alpha,
            p_u=p_u,
            betas=betas,
            seed=req.seed,
        )

    @app.post("/figures/{figure_id}")
    def figure(
        figure_id: Literal["1", "2", "3"],
        req: ScenarioOverrides,
        format: Literal["json", "csv"] = "json",
    ):
        table = experiments.run_figure(int(figure_id), req.as_overrides(), jobs=req.jobs)
        return _table_response(table, format)

    @app.post("/sweep")
    def run_sweep(req: SweepRequest, format: Literal["json", "csv"] = "json"):
        table = experiments.sweep(req.config, jobs=req.jobs)
        return _table_response(table, format)

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest):
        checks = validation.run_validation(req.trials, req.seed, req.aqnm_samples)
        return ValidateResponse(
            checks=[CheckOut.from_result(c) for c in checks],
            all_passed=all(c.passed for c in checks),
        )

    return app
