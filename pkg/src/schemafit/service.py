"""HTTP wrapper around review sessions.

Routes hold no state of their own; every handler loads the session
document from the store, so restarts and concurrent workers see the
same state.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import ConflictError, NotFoundError, SchemafitError
from .matcher import MatchConfig
from .review import Decision, SessionStore, export_csv, suggestions


class ConfigIn(BaseModel):
    test: str = "ks"
    p_thresh: float = 0.9
    bins: int = 10
    outlier_factor: float = 1.5
    top_k: int = 3
    base_order: str = "schema_order"


class SessionCreate(BaseModel):
    base_path: str
    new_path: str
    config: ConfigIn | None = None


class CreateResponse(BaseModel):
    id: str


class SessionSummary(BaseModel):
    id: str
    base_release: str
    new_release: str
    decided: int
    total: int


class DecisionIn(BaseModel):
    action: str
    base_column: str | None = None
    new_column: str | None = None


class CandidateOut(BaseModel):
    new_column: str
    p_value: float | None
    statistic: float | None
    rank: int


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def create_app(store_dir, ui_dir=None) -> FastAPI:
    store = SessionStore(store_dir)
    app = FastAPI(title="schemafit review service")

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return _error(404, "not_found", str(exc))

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError):
        return _error(409, "conflict", str(exc))

    @app.exception_handler(SchemafitError)
    async def _invalid(request: Request, exc: SchemafitError):
        return _error(422, "validation_error", str(exc))

    @app.exception_handler(OSError)
    async def _io(request: Request, exc: OSError):
        return _error(422, "io_error", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _schema(request: Request, exc: RequestValidationError):
        return _error(422, "validation_error", str(exc))

    @app.post("/api/sessions", status_code=201, response_model=CreateResponse)
    def create_session(body: SessionCreate):
        config = MatchConfig(**body.config.model_dump()) if body.config else MatchConfig()
        doc = store.create(body.base_path, body.new_path, config)
        return CreateResponse(id=doc["id"])

    @app.get("/api/sessions", response_model=list[SessionSummary])
    def list_sessions():
        return store.list_sessions()

    @app.get(
        "/api/sessions/{session_id}/suggestions",
        response_model=dict[str, list[CandidateOut]],
    )
    def get_suggestions(session_id: str, k: int = Query(default=3, ge=1)):
        return suggestions(store.load(session_id), k)

    @app.post(
        "/api/sessions/{session_id}/decisions",
        response_model=dict[str, list[CandidateOut]],
    )
    def record_decision(
        session_id: str, body: DecisionIn, k: int = Query(default=3, ge=1)
    ):
        decision = Decision(
            action=body.action,
            base_column=body.base_column,
            new_column=body.new_column,
        )
        doc = store.record(session_id, decision)
        return suggestions(doc, k)

    @app.get("/api/sessions/{session_id}/export")
    def export_session(session_id: str):
        return PlainTextResponse(export_csv(store.load(session_id)), media_type="text/csv")

    @app.get("/api/sessions/{session_id}/histograms")
    def get_histograms(session_id: str):
        return store.load(session_id)["histograms"]

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
