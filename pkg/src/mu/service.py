"""HTTP face of the consultation engine: the ``/v1`` protocol.

Thin by design — every route validates its input, takes the session lock via
the operations in :mod:`mu.session`, and serializes the result with
:mod:`mu.protocol`. Errors always come back as ``{code, message, location?}``
with a status code that matches the failure class.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .kblang import KbParseError
from .network import (
    InconsistentEvidenceError,
    OutOfDomainError,
    UnknownFindingError,
    UnknownNodeError,
)
from .protocol import (
    MalformedRequestError,
    beliefs_to_json,
    diff_to_json,
    validate_request,
)
from .queries import (
    InvalidQueryError,
    StateSpaceTooLargeError,
    UnknownParameterError,
)
from .session import (
    InvalidKbError,
    SessionError,
    SessionStore,
    SessionTerminatedError,
    UnknownKbError,
    UnknownSessionError,
    export_trace,
    get_recommendation,
    record_finding,
    run_query,
    state_doc,
)


class ApiError(Exception):
    """Carries the wire error triple plus an HTTP status."""

    def __init__(
        self, code: str, message: str, status: int, location: str | None = None
    ):
        self.code = code
        self.message = message
        self.status = status
        self.location = location
        super().__init__(message)


#: Engine/session exception class → (error code, HTTP status).
ERROR_MAP: list[tuple[type[Exception], str, int]] = [
    (UnknownKbError, "unknown-kb", 404),
    (UnknownSessionError, "unknown-session", 404),
    (InvalidKbError, "invalid-kb", 422),
    (SessionTerminatedError, "session-terminated", 409),
    (InconsistentEvidenceError, "inconsistent-evidence", 409),
    (UnknownFindingError, "unknown-finding", 422),
    (OutOfDomainError, "out-of-domain-value", 422),
    (UnknownNodeError, "unknown-node", 422),
    (UnknownParameterError, "unknown-parameter", 422),
    (InvalidQueryError, "invalid-query", 422),
    (StateSpaceTooLargeError, "state-space-too-large", 422),
    (KbParseError, "invalid-kb", 422),
    (SessionError, "session-error", 400),
]


def _to_api_error(exc: Exception) -> ApiError:
    if isinstance(exc, ApiError):
        return exc
    if isinstance(exc, MalformedRequestError):
        return ApiError("malformed-request", str(exc), 422, exc.location)
    for klass, code, status in ERROR_MAP:
        if isinstance(exc, klass):
            return ApiError(code, str(exc), status)
    return ApiError("internal-error", str(exc), 500)


def create_app(store: SessionStore) -> FastAPI:
    """Build the FastAPI application serving ``store`` under ``/v1``."""
    app = FastAPI(title="mu consultation service", version="1.0")
    app.state.store = store
    # The browser dashboard is served as static files from wherever is
    # convenient, so the API answers cross-origin requests.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError) -> JSONResponse:
        body: dict[str, Any] = {"code": exc.code, "message": exc.message}
        if exc.location is not None:
            body["location"] = exc.location
        return JSONResponse(body, status_code=exc.status)

    async def _json_body(request: Request) -> Any:
        try:
            return await request.json()
        except Exception as exc:
            raise ApiError("malformed-request", "request body is not JSON", 422) from exc

    def _session(session_id: str):
        try:
            return store.get(session_id)
        except UnknownSessionError as exc:
            raise _to_api_error(exc) from exc

    @app.get("/v1/kbs")
    def list_kbs() -> dict[str, Any]:
        return {"kbs": store.kb_names()}

    @app.post("/v1/sessions", status_code=201)
    async def create_session(request: Request) -> dict[str, Any]:
        body = await _json_body(request)
        try:
            validate_request("create-session", body)
            session = store.create(body["kb"])
        except Exception as exc:
            raise _to_api_error(exc) from exc
        return state_doc(session)

    @app.get("/v1/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict[str, Any]:
        return state_doc(_session(session_id))

    @app.get("/v1/sessions/{session_id}/recommendation")
    def recommendation(session_id: str) -> dict[str, Any]:
        session = _session(session_id)
        try:
            return get_recommendation(store, session)
        except Exception as exc:
            raise _to_api_error(exc) from exc

    @app.post("/v1/sessions/{session_id}/findings")
    async def post_finding(session_id: str, request: Request) -> dict[str, Any]:
        session = _session(session_id)
        body = await _json_body(request)
        try:
            validate_request("record-finding", body)
            result = record_finding(store, session, body["finding"], body["value"])
        except Exception as exc:
            raise _to_api_error(exc) from exc
        return {
            "finding": body["finding"],
            "value": session.network.observations[body["finding"]],
            "diff": diff_to_json(result.diff),
            "beliefs": beliefs_to_json(result.beliefs),
            "status": session.status,
        }

    @app.post("/v1/sessions/{session_id}/query")
    async def post_query(session_id: str, request: Request) -> dict[str, Any]:
        session = _session(session_id)
        body = await _json_body(request)
        try:
            return run_query(store, session, body)
        except Exception as exc:
            raise _to_api_error(exc) from exc

    @app.get("/v1/sessions/{session_id}/trace")
    def get_trace(session_id: str) -> dict[str, Any]:
        return export_trace(_session(session_id))

    return app
