"""HTTP gateway: the portal engine behind a FastAPI surface.

Every endpoint except session creation is session-checked; grants are
evaluated per request against the session opened for the calling user.
Page bodies are produced by the engine's own structured renderer and
passed through verbatim, so a page served over HTTP is byte-identical
to the page rendered by a direct library call.
"""

from __future__ import annotations

from typing import Any, Optional, Union

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from . import bundle as bundle_mod
from .access import Session
from .calculus import PredicateCharacter
from .engine import PortalEngine, TemplateType
from .errors import (
    AccessDenied,
    DanglingReference,
    DuplicateId,
    OutOfOrderEvent,
    ParseError,
    PortalError,
    SessionClosed,
    UnboundSlot,
    UnknownEvent,
    UnknownName,
    UnknownNavigationPoint,
    UnknownPoint,
    UnknownRef,
    UnreadableLocation,
)
from .repl import repl_eval
from .sources import Delete, Upsert

_STATUS_BY_CODE = {
    UnknownRef.code: 404,
    UnknownNavigationPoint.code: 404,
    UnknownName.code: 404,
    SessionClosed.code: 401,
    AccessDenied.code: 403,
    ParseError.code: 400,
    DanglingReference.code: 400,
    UnknownPoint.code: 400,
    UnknownEvent.code: 400,
    UnreadableLocation.code: 400,
    DuplicateId.code: 409,
    OutOfOrderEvent.code: 409,
    UnboundSlot.code: 409,
}


class SessionCreateRequest(BaseModel):
    user: str


class SessionCreateResponse(BaseModel):
    session: str
    role: str


class SessionCloseResponse(BaseModel):
    session: str
    closed: bool


class ChangeDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    op: str  # "upsert" | "delete"
    fields: Optional[dict[str, Any]] = None


class SourceEventRequest(BaseModel):
    key: Union[int, float, bool, str]
    change: ChangeDoc


class SourceEventResponse(BaseModel):
    seq: int
    rebuilt: list[str]


class EvalRequest(BaseModel):
    expr: str


class EvalResponse(BaseModel):
    result: str


def _error_body(exc: PortalError) -> dict:
    body: dict[str, Any] = {"error": exc.code, "detail": exc.message}
    if isinstance(exc, DanglingReference):
        body["section"] = exc.section
        body["id"] = exc.offender
    return body


def create_app(engine: PortalEngine) -> FastAPI:
    app = FastAPI(title="portalkit gateway", version="0.1.0")
    app.state.engine = engine

    @app.exception_handler(PortalError)
    async def portal_error_handler(_request: Request, exc: PortalError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(status_code=status, content=_error_body(exc))

    def session_for(session_id: Optional[str]) -> Session:
        if not session_id:
            raise SessionClosed("no session supplied")
        return engine.access.live_session(session_id)

    # -- sessions ---------------------------------------------------------------

    @app.post("/api/sessions", response_model=SessionCreateResponse)
    def create_session(req: SessionCreateRequest):
        session = engine.open_session(req.user)
        role = engine.access.users[session.user].role
        return SessionCreateResponse(session=session.id, role=role)

    @app.delete("/api/sessions/{session_id}", response_model=SessionCloseResponse)
    def close_session(session_id: str):
        closed = engine.access.end_session(session_id)
        return SessionCloseResponse(session=session_id, closed=closed)

    # -- pages ------------------------------------------------------------------

    @app.get("/api/pages/{nav_point}")
    def get_page(nav_point: str, session: Optional[str] = Query(default=None), format: str = "structured"):
        live = session_for(session)
        page = engine.page_for(nav_point, live.id)
        engine.record_view(nav_point, live.id)
        rendered = engine.render_page(page, format)
        media = "application/json" if format == "structured" else "text/html; charset=utf-8"
        return Response(content=rendered.encode("utf-8"), media_type=media)

    # -- source events ------------------------------------------------------------

    @app.post("/api/sources/{source_id}/events", response_model=SourceEventResponse)
    def post_source_event(source_id: str, req: SourceEventRequest, session: Optional[str] = Query(default=None)):
        live = session_for(session)
        engine.hub.descriptor(source_id)
        if not engine.access.check_access(live.id, source_id, "write"):
            raise AccessDenied(f"role lacks write access to source {source_id}")
        if req.change.op == "upsert":
            change = Upsert.of(dict(req.change.fields or {}))
        elif req.change.op == "delete":
            change = Delete()
        else:
            raise ParseError(f"unknown change op {req.change.op!r}")
        event = engine.hub.emit_update(source_id, req.key, change)
        return SourceEventResponse(seq=event.seq, rebuilt=sorted(engine.last_rebuilt))

    # -- admin: templates -----------------------------------------------------------

    @app.get("/api/admin/templates/{template_id}")
    def get_template(template_id: str, session: Optional[str] = Query(default=None)):
        live = session_for(session)
        if not engine.access.check_access(live.id, 1, "read"):
            raise AccessDenied("template definitions need metadata read access")
        template = engine.templates.get(template_id)
        if template is None:
            raise UnknownRef(f"unknown template {template_id}")
        return JSONResponse(content=bundle_mod.template_to_json(template))

    @app.put("/api/admin/templates/{template_id}")
    def put_template(template_id: str, doc: dict, session: Optional[str] = Query(default=None)):
        live = session_for(session)
        if not engine.access.check_access(live.id, 1, "write"):
            raise AccessDenied("editing templates needs metadata write access")
        if doc.get("id") != template_id:
            raise ParseError("template id in body must match the path")
        if template_id not in engine.templates:
            raise UnknownRef(f"unknown template {template_id}")
        template = bundle_mod.parse_template(doc)
        engine.replace_template(template)
        return JSONResponse(content=bundle_mod.template_to_json(template))

    # -- metadata ----------------------------------------------------------------------

    @app.get("/api/meta/{level}/{object_id}")
    def get_meta(level: int, object_id: str, session: Optional[str] = Query(default=None)):
        live = session_for(session)
        if not engine.access.check_access(live.id, level, "read"):
            raise AccessDenied(f"role lacks read access to metadata level {level}")
        obj = engine.meta.lookup(level, object_id)
        if obj is None:
            raise UnknownRef(f"no level-{level} object {object_id}")
        return JSONResponse(content={"level": level, "object": _meta_doc(obj)})

    # -- statistics ----------------------------------------------------------------------

    @app.get("/api/stats")
    def get_stats(session: Optional[str] = Query(default=None)):
        session_for(session)
        return JSONResponse(content=engine.stats_report())

    # -- evaluator --------------------------------------------------------------------------

    @app.post("/api/eval", response_model=EvalResponse)
    def post_eval(req: EvalRequest, session: Optional[str] = Query(default=None)):
        session_for(session)
        return EvalResponse(result=repl_eval(engine, req.expr))

    return app


def _meta_doc(obj: Any) -> dict:
    if isinstance(obj, PredicateCharacter):
        return {
            "id": obj.id,
            "kind": "predicate_character",
            "level": obj.level,
            "base_level": obj.base.level,
            "formula": obj.formula.to_json(),
        }
    if isinstance(obj, TemplateType):
        return {
            "id": obj.id,
            "kind": "template_type",
            "slot_signature": [[n, k] for n, k in obj.slot_signature],
        }
    # level-0 carrier objects are individuals
    return {
        "id": obj.id,
        "kind": "individual",
        "type": obj.type,
        "attrs": dict(obj.attrs),
        "state": obj.state,
    }
