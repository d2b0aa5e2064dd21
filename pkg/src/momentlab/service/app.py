"""FastAPI application wrapping the computation modules.

Coefficient tables are registered in-process per (weight, n_max) so repeated
requests never rebuild; building a large table dominates every other cost.
Mathematical input errors surface as HTTP 400 with the original message.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..counting import (
    CountReport,
    DyadicBox,
    FastCounter,
    _lemma6_bound,
    lemma_ratio_sweep,
)
from ..forms import (
    CoefficientTable,
    cache_filename,
    check_deligne,
    check_hecke,
    load_or_build_table,
)
from ..moments import error_exponent_fit, moment_exact
from ..reports import (
    constant_summary,
    count_csv,
    decompose_summary,
    moments_csv,
    moments_summary,
    voronoi_csv,
    voronoi_summary,
)
from ..resonance import constant_Ck, s_trunc, tail_fit
from ..voronoi import decompose_S, resonance_sum_R, truncation_error_profile
from . import models

__all__ = ["create_app"]


def create_app() -> FastAPI:
    app = FastAPI(title="momentlab", version=__version__)
    registry: dict[tuple[int, int], CoefficientTable] = {}
    lock = threading.Lock()

    def get_table(weight: int, n_max: int, cache_dir: str | None):
        key = (weight, n_max)
        with lock:
            cached = registry.get(key)
        if cached is not None:
            return cached, False
        table, rebuilt = load_or_build_table(weight, n_max, cache_dir)
        with lock:
            registry[key] = table
        return table, rebuilt

    @app.get("/health", response_model=models.HealthResponse)
    def health() -> models.HealthResponse:
        return models.HealthResponse(status="ok", version=__version__)

    @app.post("/coeffs", response_model=models.CoeffsResponse)
    def coeffs(req: models.CoeffsRequest) -> models.CoeffsResponse:
        try:
            table, rebuilt = get_table(req.weight, req.n_max, req.cache_dir)
            cache_file = None
            if req.cache_dir is not None:
                cache_file = str(
                    Path(req.cache_dir) / cache_filename(req.weight, req.n_max)
                )
            passed = True
            deligne = hecke = None
            if req.run_deligne:
                rep = check_deligne(table)
                deligne = models.DeligneOut(
                    passed=rep.passed,
                    max_ratio=rep.max_ratio,
                    argmax_n=rep.argmax_n,
                    first_violation=rep.first_violation,
                )
                passed = passed and rep.passed
            if req.hecke_trials:
                rep = check_hecke(table, req.hecke_trials, req.seed)
                hecke = models.HeckeOut(
                    passed=rep.passed,
                    coprime_pairs_checked=rep.coprime_pairs_checked,
                    prime_squares_checked=rep.prime_squares_checked,
                    failures=[list(f) for f in rep.failures],
                )
                passed = passed and rep.passed
            return models.CoeffsResponse(
                weight=req.weight,
                n_max=req.n_max,
                rebuilt=rebuilt,
                cache_file=cache_file,
                passed=passed,
                deligne=deligne,
                hecke=hecke,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/moments", response_model=models.MomentsResponse)
    def moments(req: models.MomentsRequest) -> models.MomentsResponse:
        try:
            table, _ = get_table(req.weight, req.n_max, req.cache_dir)
            if req.raw:
                vals = [moment_exact(table, req.k, t) for t in req.t_list]
                summary = {
                    "weight": req.weight,
                    "k": req.k,
                    "moments": [
                        {"T": t, "value": str(v)} for t, v in zip(req.t_list, vals)
                    ],
                }
                return models.MomentsResponse(csv="", summary=summary)
            y_used = req.y_used if req.y_used is not None else req.n_max
            c_k = constant_Ck(table, req.k, y_used, req.precision_bits)
            fit = error_exponent_fit(
                table, c_k, y_used, req.k, req.t_list, req.precision_bits
            )
            return models.MomentsResponse(
                csv=moments_csv(fit.reports, req.precision_bits),
                summary=moments_summary(fit, table.weight, req.k),
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/constant", response_model=models.ConstantResponse)
    def constant(req: models.ConstantRequest) -> models.ConstantResponse:
        try:
            table, _ = get_table(req.weight, req.n_max, req.cache_dir)
            values = [
                s_trunc(table, req.k, req.l, y, req.precision_bits)
                for y in req.y_list
            ]
            try:
                fit = tail_fit(
                    table,
                    req.k,
                    req.l,
                    req.y_list,
                    req.precision_bits,
                    values=[v.value for v in values],
                )
            except ValueError:
                # short or non-dyadic ladders still report plain values
                fit = None
            return models.ConstantResponse(
                summary=constant_summary(values, fit, req.weight)
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/count", response_model=models.CountResponse)
    def count(req: models.CountRequest) -> models.CountResponse:
        try:
            box = DyadicBox(*req.box)
            if req.lemma == "A1":
                reports, alarms = lemma_ratio_sweep(
                    [box], req.deltas, req.alarm_threshold
                )
            elif req.lemma == "Apm":
                if req.sign not in ("+", "-"):
                    raise ValueError("sign must be '+' or '-'")
                counter = FastCounter(box, req.sign)
                reports = []
                for delta in req.deltas:
                    n = counter.count(delta)
                    bound = _lemma6_bound(box, delta)
                    reports.append(
                        CountReport(
                            box=box,
                            delta=delta,
                            sign=req.sign,
                            count=n,
                            bound=bound,
                            ratio=n / bound,
                        )
                    )
                alarms = [r for r in reports if r.ratio > req.alarm_threshold]
            else:
                raise ValueError("lemma must be 'A1' or 'Apm'")
            return models.CountResponse(csv=count_csv(reports), alarms=len(alarms))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/voronoi", response_model=models.VoronoiResponse)
    def voronoi(req: models.VoronoiRequest) -> models.VoronoiResponse:
        try:
            table, _ = get_table(req.weight, req.n_max, req.cache_dir)
            profile = truncation_error_profile(
                table,
                req.x_lo,
                req.x_hi,
                req.n_list,
                grid_size=req.grid_size,
                precision_bits=req.precision_bits,
                seed=req.seed,
            )
            return models.VoronoiResponse(
                csv=voronoi_csv(profile, req.precision_bits),
                summary=voronoi_summary(profile),
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/decompose", response_model=models.DecomposeResponse)
    def decompose(req: models.DecomposeRequest) -> models.DecomposeResponse:
        try:
            table, _ = get_table(req.weight, req.y, req.cache_dir)
            pieces = decompose_S(table, req.x, req.y, req.precision_bits)
            r_val = resonance_sum_R(table, req.x, req.y, req.precision_bits)
            return models.DecomposeResponse(
                summary=decompose_summary(
                    pieces, r_val, req.x, req.y, req.weight, req.precision_bits
                )
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    return app
