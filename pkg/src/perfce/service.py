"""HTTP/JSON service over a loaded SEM and trace.

Read-only: handlers never mutate the loaded artifacts, so concurrent
requests are safe. Responses are serialized with the same stable-JSON
writer as the CLI, making identical queries byte-identical across the
two surfaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from pydantic import BaseModel, Field

from .dataset import Dataset, load_dataset
from .errors import NotAnAncestor, PerfceError, UnknownNode
from .rca import (
    diagnosis_payload,
    root_cause_analysis,
    snapshot_from_window,
    whatif_payload,
)
from .sem import Sem, sem_from_json
from .util import stable_json

SERIES_POINT_CAP = 2000

_HTTP_STATUS = {
    "not_found": 404,
    "bad_request": 400,
    "not_ready": 503,
    "internal": 500,
}


@dataclass
class ServiceState:
    sem: Sem | None
    trace: Dataset | None
    port: int = 8321
    bind: str = "127.0.0.1"
    static_path: str | None = None

    @classmethod
    def load(cls, sem_path, trace_path, port=8321, bind="127.0.0.1",
             static_path=None) -> "ServiceState":
        sem = sem_from_json(Path(sem_path).read_text(encoding="utf-8"))
        trace = load_dataset(trace_path)
        return cls(sem=sem, trace=trace, port=port, bind=bind,
                   static_path=static_path)


class _ApiFailure(Exception):
    def __init__(self, code: str, message: str, detail: dict | None = None):
        self.code = code
        self.message = message
        self.detail = detail or {}


def _json_response(payload, status: int = 200) -> Response:
    return Response(content=stable_json(payload), status_code=status,
                    media_type="application/json")


def _error_response(code: str, message: str, detail=None) -> Response:
    payload = {"code": code, "message": message, "detail": detail or {}}
    return _json_response(payload, status=_HTTP_STATUS[code])


class Window(BaseModel):
    model_config = {"populate_by_name": True}

    from_: int | None = Field(default=None, alias="from")
    to: int | None = None


class DiagnoseRequest(BaseModel):
    target: str
    window: Window | None = None
    top_k: int | None = None


class WhatIfRequest(BaseModel):
    target: str
    window: Window | None = None
    interventions: dict[str, float]


def build_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="perfce", docs_url=None, redoc_url=None)

    def ready() -> tuple[Sem, Dataset]:
        if state.sem is None or state.trace is None:
            raise _ApiFailure("not_ready", "sem and trace must both be loaded")
        return state.sem, state.trace

    def resolve_window(window: Window | None, n_rows: int) -> tuple[int, int]:
        start = window.from_ if window and window.from_ is not None else 0
        end = window.to if window and window.to is not None else n_rows
        if not 0 <= start < end <= n_rows:
            raise _ApiFailure("bad_request",
                              f"window [{start}, {end}) out of range 0..{n_rows}")
        return start, end

    @app.exception_handler(_ApiFailure)
    async def on_failure(_: Request, exc: _ApiFailure):
        return _error_response(exc.code, exc.message, exc.detail)

    @app.exception_handler(RequestValidationError)
    async def on_validation(_: Request, exc: RequestValidationError):
        return _error_response("bad_request", "invalid request body",
                               {"errors": [str(e["msg"]) for e in exc.errors()]})

    @app.exception_handler(PerfceError)
    async def on_domain_error(_: Request, exc: PerfceError):
        if isinstance(exc, UnknownNode):
            return _error_response("not_found", str(exc))
        if isinstance(exc, NotAnAncestor):
            return _error_response("bad_request", str(exc))
        return _error_response("internal", str(exc))

    @app.exception_handler(ValueError)
    async def on_value_error(_: Request, exc: ValueError):
        return _error_response("bad_request", str(exc))

    @app.get("/api/kpis")
    def kpis():
        _, trace = ready()
        return _json_response([
            {
                "name": c.name,
                "unit": c.unit,
                "kind": c.kind,
                "description": c.description,
            }
            for c in trace.columns
        ])

    @app.get("/api/graph")
    def graph():
        sem, _ = ready()
        return _json_response({
            "nodes": list(sem.graph.nodes),
            "edges": [list(e) for e in sorted(sem.graph.edges)],
            "baseline_means": sem.baseline_means,
            "node_kinds": sem.node_kinds,
        })

    @app.get("/api/series")
    def series(kpi: str, request: Request):
        _, trace = ready()
        if kpi not in trace.column_names:
            raise _ApiFailure("not_found", f"no KPI named {kpi!r}")
        params = request.query_params
        try:
            start = int(params.get("from", 0))
            end = int(params.get("to", trace.n_rows))
        except ValueError:
            raise _ApiFailure("bad_request", "from/to must be integers") from None
        if not 0 <= start < end <= trace.n_rows:
            raise _ApiFailure("bad_request",
                              f"range [{start}, {end}) out of 0..{trace.n_rows}")
        column = trace.column(kpi)[start:end]
        stride = max(1, -(-len(column) // SERIES_POINT_CAP))
        points = [[start + i, float(column[i])] for i in range(0, len(column), stride)]
        segments = [
            seg.to_dict() for seg in trace.segments
            if seg.start < end and seg.end > start
        ]
        return _json_response({
            "kpi": kpi,
            "from": start,
            "to": end,
            "stride": stride,
            "points": points,
            "segments": segments,
        })

    @app.post("/api/diagnose")
    def diagnose(body: DiagnoseRequest):
        sem, trace = ready()
        start, end = resolve_window(body.window, trace.n_rows)
        snapshot = snapshot_from_window(trace, start, end)
        diagnosis = root_cause_analysis(sem, snapshot, body.target)
        return _json_response(diagnosis_payload(diagnosis, body.top_k))

    @app.post("/api/whatif")
    def whatif(body: WhatIfRequest):
        sem, trace = ready()
        if not body.interventions:
            raise _ApiFailure("bad_request", "interventions must be non-empty")
        start, end = resolve_window(body.window, trace.n_rows)
        snapshot = snapshot_from_window(trace, start, end)
        return _json_response(
            whatif_payload(sem, snapshot, body.target, body.interventions))

    if state.static_path:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=state.static_path, html=True),
                  name="console")

    return app
