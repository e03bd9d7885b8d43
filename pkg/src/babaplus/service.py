"""In-memory game sessions behind a small HTTP API.

Endpoints: create a session from a level document or a PCP instance, inspect
the current snapshot, post moves, undo, and ask for the next hint move when
the session was created from a PCP instance with a known solution.
"""
from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .compiler import compile_instance, synthesize_moves
from .engine import MoveAction, StepOnTerminal, TraceEvent, step
from .grid import Level, Status, state_hash
from .levelfile import load_level, save_level
from .pcp import PcpInstance, parse_pcp_text
from .rules import Paradox, analyze

HISTORY_CAP = 10_000


@dataclass
class Session:
    id: str
    level: Level
    history: list[Level] = field(default_factory=list)
    trace: list[TraceEvent] = field(default_factory=list)
    hints: list[MoveAction] = field(default_factory=list)
    hint_cursor: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class CreateRequest(BaseModel):
    level_text: Optional[str] = None
    pcp_text: Optional[str] = None
    solution: Optional[list[int]] = None


class MoveRequest(BaseModel):
    action: str


def snapshot(session: Session) -> dict:
    level = session.level
    rules, resolution, _ = analyze(level)
    active = [] if isinstance(resolution, Paradox) else sorted(
        r.serialize() for r in rules)
    objects = [
        {
            "id": o.id,
            "payload": o.payload.token(),
            "x": o.x,
            "y": o.y,
            "facing": o.facing.value,
        }
        for _, o in sorted(session.level.objects.items())
    ]
    return {
        "session_id": session.id,
        "width": level.width,
        "height": level.height,
        "hallway_rows": list(level.hallway_rows),
        "turn": level.turn,
        "status": level.status,
        "status_detail": level.status_detail,
        "state_hash": state_hash(level),
        "active_rules": active,
        "objects": objects,
    }


def create_app() -> FastAPI:
    app = FastAPI(title="babaplus session service")
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.post("/sessions")
    def create_session(req: CreateRequest):
        if (req.level_text is None) == (req.pcp_text is None):
            raise HTTPException(status_code=422,
                                detail="provide exactly one of level_text or pcp_text")
        hints: list[MoveAction] = []
        if req.level_text is not None:
            try:
                level = load_level(req.level_text)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        else:
            try:
                inst = parse_pcp_text(req.pcp_text)
                compiled = compile_instance(inst)
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            level = compiled.level
            if req.solution:
                try:
                    hints = synthesize_moves(compiled, tuple(req.solution))
                except ValueError as exc:
                    raise HTTPException(status_code=422, detail=str(exc))
        session = Session(id=uuid.uuid4().hex, level=level, hints=hints)
        sessions[session.id] = session
        return snapshot(session)

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        return snapshot(get_session(session_id))

    @app.post("/sessions/{session_id}/move")
    def post_move(session_id: str, req: MoveRequest):
        session = get_session(session_id)
        try:
            action = MoveAction(req.action.lower())
        except ValueError:
            raise HTTPException(status_code=422, detail=f"malformed action {req.action!r}")
        with session.lock:
            try:
                new_level, events = step(session.level, action)
            except StepOnTerminal:
                raise HTTPException(status_code=409, detail="level already terminal")
            session.history.append(session.level)
            if len(session.history) > HISTORY_CAP:
                session.history.pop(0)
            session.level = new_level
            session.trace.extend(events)
            if session.hint_cursor < len(session.hints) \
                    and session.hints[session.hint_cursor] == action:
                session.hint_cursor += 1
            body = snapshot(session)
            body["events"] = [e.serialize() for e in events]
            return body

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        with session.lock:
            if not session.history:
                raise HTTPException(status_code=409, detail="nothing to undo")
            session.level = session.history.pop()
            if session.hint_cursor > 0:
                session.hint_cursor -= 1
            return snapshot(session)

    @app.get("/sessions/{session_id}/hint")
    def get_hint(session_id: str):
        session = get_session(session_id)
        if not session.hints:
            raise HTTPException(status_code=404, detail="session has no stored solution")
        if session.hint_cursor >= len(session.hints):
            return {"action": None, "remaining": 0}
        return {
            "action": session.hints[session.hint_cursor].value,
            "remaining": len(session.hints) - session.hint_cursor,
        }

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        session = get_session(session_id)
        return {"trace": [e.serialize() for e in session.trace]}

    return app
