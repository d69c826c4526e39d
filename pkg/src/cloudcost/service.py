"""HTTP API exposing validation, simulation and stored reports.

Reports persist as content-addressed JSON files (the id is the SHA-256 of
the canonical report bytes), written via temp-file-and-rename so concurrent
readers never observe partial writes. Catalogs load from a directory at
startup and on an explicit reload call.

Configuration: ``CLOUDCOST_ADDR``, ``CLOUDCOST_CATALOG_DIR`` and
``CLOUDCOST_REPORT_DIR`` environment variables, or the equivalent
``cloudcost serve`` flags.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .catalog import CatalogError, PriceCatalog, PriceNotFoundError, catalog_from_obj, load_catalog, scenario_from_obj
from .engine import EngineError, simulate
from .finance import (
    FinanceError,
    FinancialOption,
    annualize,
    compare_options,
    npv,
    on_premise_cash_flows,
    plan_from_obj,
)
from .model import ModelError, model_from_obj, validate
from .patterns import MonthWindow, YearMonth
from .report import emit_csv, emit_html, emit_json, report_from_json, report_id

__all__ = ["create_app", "app_from_env", "ReportStore"]


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={"code": self.code, "message": self.message,
                     "details": self.details},
        )


class ReportStore:
    """Content-addressed directory of canonical report JSON files."""

    def __init__(self, root: str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, rid: str) -> Path:
        return self.root / f"{rid}.report.json"

    def put(self, rid: str, body: bytes, request_echo: dict) -> None:
        path = self._path(rid)
        if path.exists():  # identical content: nothing to do
            return
        envelope = {
            "report_id": rid,
            "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "request": request_echo,
            "body": json.loads(body.decode("utf-8")),
        }
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(envelope, f, sort_keys=True, separators=(",", ":"))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    _ID_CHARS = frozenset("0123456789abcdef")

    def get(self, rid: str) -> Optional[bytes]:
        if not rid or set(rid) - self._ID_CHARS:
            return None
        path = self._path(rid)
        if not path.exists():
            return None
        envelope = json.loads(path.read_text(encoding="utf-8"))
        return json.dumps(envelope["body"], sort_keys=True,
                          separators=(",", ":"), ensure_ascii=False).encode("utf-8")


class CatalogDirectory:
    def __init__(self, root: str):
        self.root = Path(root)
        self.catalogs: dict[str, PriceCatalog] = {}
        self.reload()

    def reload(self) -> None:
        catalogs = {}
        for path in sorted(self.root.glob("*.prices.json")):
            catalog = load_catalog(str(path))
            label = catalog.label or path.name.removesuffix(".prices.json")
            catalogs[label] = catalog
        self.catalogs = catalogs


def app_from_env() -> FastAPI:
    catalog_dir = os.environ.get("CLOUDCOST_CATALOG_DIR", "fixtures")
    report_dir = os.environ.get("CLOUDCOST_REPORT_DIR", "reports")
    return create_app(catalog_dir=catalog_dir, report_dir=report_dir)


def create_app(catalog_dir: str, report_dir: str,
               frontend_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="cloudcost", docs_url=None, redoc_url=None)
    store = ReportStore(report_dir)
    catalogs = CatalogDirectory(catalog_dir)

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return exc.response()

    async def _read_json(request: Request) -> Any:
        raw = await request.body()
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ApiError(400, "bad-json", f"request body is not valid JSON: {e}") from None

    @app.post("/v1/validate")
    async def validate_model(request: Request) -> JSONResponse:
        doc = await _read_json(request)
        try:
            model = model_from_obj(doc)
        except ModelError as e:
            raise ApiError(400, "bad-model", str(e)) from None
        violations = validate(model)
        return JSONResponse({"violations": [
            {"element": v.element, "rule": v.rule, "message": v.message}
            for v in violations
        ]})

    @app.post("/v1/simulate")
    async def simulate_model(request: Request) -> JSONResponse:
        body = await _read_json(request)
        if not isinstance(body, dict):
            raise ApiError(400, "bad-request", "request body must be a JSON object")
        report_bytes, rid, echo = _run_simulation(body, catalogs)
        store.put(rid, report_bytes, echo)
        return JSONResponse({"report_id": rid,
                             "report": json.loads(report_bytes.decode("utf-8"))})

    @app.post("/v1/compare")
    async def compare(request: Request) -> JSONResponse:
        body = await _read_json(request)
        if not isinstance(body, dict):
            raise ApiError(400, "bad-request", "request body must be a JSON object")
        return JSONResponse(_run_comparison(body, catalogs))

    @app.get("/v1/reports/{rid}")
    async def get_report(rid: str, request: Request) -> Response:
        body = store.get(rid)
        if body is None:
            raise ApiError(404, "not-found", f"no stored report {rid!r}")
        accept = request.headers.get("accept", "application/json")
        report, npv_results = report_from_json(body)
        if "text/csv" in accept:
            return Response(content=emit_csv(report), media_type="text/csv")
        if "text/html" in accept:
            return Response(content=emit_html(report, npv_results),
                            media_type="text/html")
        return Response(content=body, media_type="application/json")

    @app.get("/v1/catalogs")
    async def list_catalogs() -> JSONResponse:
        return JSONResponse([
            {"label": label, "as_of": catalog.as_of}
            for label, catalog in sorted(catalogs.catalogs.items())
        ])

    @app.post("/v1/catalogs/reload")
    async def reload_catalogs() -> JSONResponse:
        try:
            catalogs.reload()
        except CatalogError as e:
            raise ApiError(422, "bad-catalog", str(e)) from None
        return JSONResponse({"loaded": sorted(catalogs.catalogs)})

    frontend = frontend_dir or os.environ.get("CLOUDCOST_FRONTEND_DIR")
    if frontend is None:
        for root in (Path(__file__).resolve().parents[2], Path.cwd()):
            bundled = root / "frontend" / "dist"
            if bundled.is_dir():
                frontend = str(bundled)
                break
    if frontend and Path(frontend).is_dir():
        app.mount("/", StaticFiles(directory=frontend, html=True), name="explorer")

    return app


def _run_comparison(body: dict, catalogs: CatalogDirectory) -> dict:
    """Rank cloud options (simulated) and an optional on-premise plan by NPV."""
    raw_options = body.get("options")
    if not isinstance(raw_options, list) or not raw_options:
        raise ApiError(400, "bad-request", 'compare requires an "options" list')
    rate_text = str(body.get("discount_rate", "0.05"))
    options: list[FinancialOption] = []
    for obj in raw_options:
        if not isinstance(obj, dict) or "label" not in obj or "model" not in obj:
            raise ApiError(400, "bad-request", "each option needs a label and a model")
        sub = dict(body)
        sub["model"] = obj["model"]
        report_bytes, _rid, _echo = _run_simulation(sub, catalogs)
        report, _npvs = report_from_json(report_bytes)
        if len(report.monthly_totals) % 12 != 0:
            raise ApiError(400, "bad-window", "compare requires a year-aligned window")
        annual = annualize(report, report.window.start)
        options.append(FinancialOption(label=str(obj["label"]),
                                       cash_flows=annual.cash_flows))
    plan_label = None
    if body.get("plan") is not None:
        plan_obj = body["plan"]
        try:
            plan = plan_from_obj(plan_obj)
        except (FinanceError, KeyError, TypeError, ValueError) as e:
            raise ApiError(400, "bad-plan", f"bad on-premise plan: {e}") from None
        plan_label = str(plan_obj.get("label", "on-premise"))
        horizon = max(o.horizon_years for o in options) if options else 1
        options.append(on_premise_cash_flows(plan, horizon, label=plan_label))
    if len(options) < 2:
        raise ApiError(400, "bad-request", "need >= 2 options to compare")
    reference = str(body.get("reference") or plan_label or options[0].label)
    try:
        comparison = compare_options(options, rate_text, reference)
    except FinanceError as e:
        raise ApiError(422, "comparison-failed", str(e)) from None
    npv_by_label = {o.label: npv(o, rate_text) for o in options}
    return {
        "reference": comparison.reference,
        "rate": rate_text,
        "rows": [{
            "label": row.label,
            "npv": str(row.npv),
            "pct_vs_reference": str(row.pct_vs_reference),
            "year0": str(row.year0),
            "cash_flows": {str(y): str(v)
                           for y, v in sorted(
                               next(o for o in options if o.label == row.label)
                               .cash_flows.items())},
            "per_year_discounted": {
                str(y): str(v)
                for y, v in npv_by_label[row.label].per_year_discounted.items()},
        } for row in comparison.rows],
    }


def _run_simulation(body: dict, catalogs: CatalogDirectory) -> tuple[bytes, str, dict]:
    window_obj = body.get("window")
    if not isinstance(window_obj, dict) or "from" not in window_obj or "to" not in window_obj:
        raise ApiError(400, "bad-window", 'simulate requires "window": {"from", "to"}')
    try:
        start = YearMonth.parse(str(window_obj["from"]))
        end = YearMonth.parse(str(window_obj["to"]))
    except ValueError as e:
        raise ApiError(400, "bad-window", str(e)) from None
    if start > end:
        raise ApiError(400, "bad-window", f"window from {start} is after to {end}")
    window = MonthWindow(start, end)

    if "model" not in body:
        raise ApiError(400, "bad-request", 'simulate requires a "model"')
    try:
        model = model_from_obj(body["model"])
    except ModelError as e:
        raise ApiError(400, "bad-model", str(e)) from None
    violations = validate(model)
    if violations:
        raise ApiError(422, "invalid-model", "model fails validation", details=[
            {"element": v.element, "rule": v.rule, "message": v.message}
            for v in violations
        ])

    if "catalog" in body:
        try:
            catalog = catalog_from_obj(body["catalog"])
        except CatalogError as e:
            raise ApiError(400, "bad-catalog", str(e)) from None
    elif "catalog_ref" in body:
        label = str(body["catalog_ref"])
        catalog = catalogs.catalogs.get(label)
        if catalog is None:
            raise ApiError(422, "catalog-not-found", f"catalog not found: {label!r}",
                           details={"available": sorted(catalogs.catalogs)})
    else:
        raise ApiError(400, "bad-request", 'simulate requires "catalog" or "catalog_ref"')

    scenario = None
    if body.get("scenario") is not None:
        try:
            scenario = scenario_from_obj(body["scenario"])
        except CatalogError as e:
            raise ApiError(400, "bad-scenario", str(e)) from None

    rate_text = str(body.get("discount_rate", "0.05"))
    try:
        rate = Decimal(rate_text)
    except InvalidOperation:
        raise ApiError(400, "bad-rate", f"bad discount rate {rate_text!r}") from None

    try:
        report = simulate(model, catalog, window, scenario)
    except (PriceNotFoundError, EngineError) as e:
        raise ApiError(422, "simulation-failed", str(e)) from None

    npv_results = []
    if len(window) % 12 == 0:
        npv_results.append(npv(annualize(report, window.start), rate))
    report_bytes = emit_json(report, npv_results)
    echo = {
        "model_name": model.name,
        "catalog_label": catalog.label,
        "scenario_label": scenario.label if scenario else None,
        "window": {"from": str(start), "to": str(end)},
        "discount_rate": rate_text,
    }
    return report_bytes, report_id(report_bytes), echo
