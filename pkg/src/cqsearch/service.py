"""HTTP session service: search, clarifying questions, answers, paging and
interaction logging, consumed by the web client.

Field names are part of the wire contract; see docs/api.md.
"""

from __future__ import annotations

import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import Answer, ClarifyingQuestion, EngineError, RefineConfig
from .session import (
    METHODS,
    SearchContext,
    apply_and_rerank,
    new_session,
    next_question,
)
from .store import SessionRecord, SessionStore, state_from_dict
from .tasks import build_task_table

PAGE_SIZE = 10
MAX_PAGES = 5


class CreateSessionBody(BaseModel):
    query: str
    method: str | None = None


class AnswerBody(BaseModel):
    selected: str | None = None
    none: bool = False
    yes: bool = False
    no: bool = False


class EventBody(BaseModel):
    kind: str
    payload: dict = {}


def _question_payload(cq: ClarifyingQuestion | None) -> dict | None:
    if cq is None:
        return None
    return {"text": cq.text, "options": list(cq.options), "kind": cq.kind,
            "template": cq.template_id}


def create_app(
    ctx: SearchContext,
    store_path: str | Path | None = None,
    default_method: str = "zacq",
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="cqsearch session service")
    sessions: dict[str, SessionRecord] = {}
    locks: dict[str, threading.Lock] = {}
    registry_lock = threading.Lock()
    store = SessionStore(store_path) if store_path else None
    questions: dict[str, ClarifyingQuestion | None] = {}

    if store is not None:
        for sid, snapshot in store.load_raw().items():
            try:
                result_ids = snapshot["state"]["result_ids"]
                table = build_task_table(
                    [ctx.docs_by_id[fid] for fid in result_ids], ctx.lexicon)
                state = state_from_dict(snapshot["state"], table)
            except Exception:
                continue
            record = SessionRecord(
                session_id=sid, state=state, method=snapshot["method"],
                created=snapshot["created"], updated=snapshot["updated"],
                events=snapshot.get("events", []),
                question=snapshot.get("question"),
                answers=snapshot.get("answers", []),
            )
            sessions[sid] = record
            locks[sid] = threading.Lock()
            questions[sid] = None if state.done else next_question(state, ctx.lexicon)

    def _record(session_id: str) -> SessionRecord:
        record = sessions.get(session_id)
        if record is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return record

    def _page(record: SessionRecord, page: int) -> dict:
        entries = record.state.ranking.entries
        if page < 1 or page > MAX_PAGES:
            raise HTTPException(status_code=400, detail=f"page must be 1..{MAX_PAGES}")
        lo = (page - 1) * PAGE_SIZE
        rows = []
        for offset, (fid, score) in enumerate(entries[lo: lo + PAGE_SIZE]):
            doc = ctx.docs_by_id[fid]
            rows.append({
                "rank": lo + offset + 1,
                "id": fid,
                "score": round(score, 6),
                "name": doc.name,
                "comment": doc.comment,
                "url": doc.url,
            })
        return {"page": page, "page_size": PAGE_SIZE, "total": len(entries),
                "items": rows}

    def _persist(record: SessionRecord) -> None:
        if store is not None:
            store.save(record)

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session(body: CreateSessionBody) -> dict:
        method = body.method or default_method
        if method not in METHODS:
            raise HTTPException(status_code=400, detail=f"unknown method {method!r}")
        if not body.query.strip():
            raise HTTPException(status_code=400, detail="query must be non-empty")
        state = new_session(ctx, body.query, method=method, config=RefineConfig())
        session_id = uuid.uuid4().hex
        record = SessionRecord(
            session_id=session_id, state=state, method=method,
            created=time.time(), updated=time.time())
        cq = next_question(state, ctx.lexicon)
        record.question = _question_payload(cq)
        record.log_event("query", {"query": body.query, "method": method})
        with registry_lock:
            sessions[session_id] = record
            locks[session_id] = threading.Lock()
            questions[session_id] = cq
        _persist(record)
        return {
            "session_id": session_id,
            "method": method,
            "round": state.round,
            "done": state.done,
            "results": _page(record, 1),
            "question": record.question,
        }

    @app.post("/sessions/{session_id}/answer")
    def answer_session(session_id: str, body: AnswerBody) -> dict:
        record = _record(session_id)
        with locks[session_id]:
            if record.state.done or questions.get(session_id) is None:
                raise HTTPException(status_code=409, detail="session is done")
            flags = [body.selected is not None, body.none, body.yes, body.no]
            if sum(flags) != 1:
                raise HTTPException(
                    status_code=400,
                    detail="answer must set exactly one of selected/none/yes/no")
            cq = questions[session_id]
            try:
                answer = Answer(selected=body.selected, none=body.none,
                                yes=body.yes, no=body.no)
                apply_and_rerank(record.state, cq, answer, ctx.index)
            except EngineError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            kind = "option_selected" if (body.selected or body.yes) else "none_selected"
            record.log_event(kind, {
                "selected": body.selected, "none": body.none,
                "yes": body.yes, "no": body.no})
            record.answers.append({
                "round": record.state.round,
                "selected": body.selected, "none": body.none,
                "yes": body.yes, "no": body.no})
            next_cq = next_question(record.state, ctx.lexicon)
            questions[session_id] = next_cq
            record.question = _question_payload(next_cq)
            _persist(record)
            return {
                "session_id": session_id,
                "round": record.state.round,
                "done": record.state.done,
                "results": _page(record, 1),
                "question": record.question,
            }

    @app.get("/sessions/{session_id}/results")
    def get_results(session_id: str, page: int = 1) -> dict:
        record = _record(session_id)
        payload = _page(record, page)
        record.log_event("page_change", {"page": page})
        _persist(record)
        return payload

    @app.post("/sessions/{session_id}/events", status_code=204)
    def post_event(session_id: str, body: EventBody) -> Response:
        record = _record(session_id)
        try:
            record.log_event(body.kind, body.payload)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        _persist(record)
        return Response(status_code=204)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        record = _record(session_id)
        return {
            "session_id": session_id,
            "method": record.method,
            "round": record.state.round,
            "done": record.state.done,
            "question": record.question,
            "events": len(record.events),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
