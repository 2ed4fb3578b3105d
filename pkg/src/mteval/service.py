"""Annotation service: event-sourced session store plus its HTTP surface.

Every state change is appended to ``events.jsonl`` in the session data
directory; replaying that log reconstructs the live state exactly, which
is what the durability tests exercise. Annotation payloads are stored in
the same one-record-per-line format the export endpoint emits, so the log
stays human-inspectable and diff-friendly.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, ConfigDict

from . import gae
from .errors import DataError, NotFoundError, ValidationError
from .gae import GaeAnnotation, GaeSession, SessionItem

EVENT_LOG_NAME = "events.jsonl"

KIND_SESSION_CREATED = "session_created"
KIND_SUBMITTED = "annotation_submitted"
KIND_REPLACED = "annotation_replaced"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class AnnotationEvent:
    """One log entry; sequence numbers are dense and strictly increasing."""

    seq: int
    kind: str
    session_id: str
    payload: Mapping
    wall_time: str

    def to_line(self) -> str:
        return json.dumps(
            {
                "seq": self.seq,
                "kind": self.kind,
                "session_id": self.session_id,
                "wall_time": self.wall_time,
                "payload": dict(self.payload),
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_line(cls, line: str) -> "AnnotationEvent":
        record = json.loads(line)
        return cls(
            seq=int(record["seq"]),
            kind=record["kind"],
            session_id=record["session_id"],
            payload=record["payload"],
            wall_time=record["wall_time"],
        )


class SessionStore:
    """System of record for annotation sessions.

    All mutations run under one lock (single writer); reads take the same
    lock so every response reflects a consistent snapshot.
    """

    def __init__(self, data_dir=None):
        self._sessions: dict[str, GaeSession] = {}
        self._seq = 0
        self._lock = threading.Lock()
        self._log_path: Path | None = None
        if data_dir is not None:
            directory = Path(data_dir)
            directory.mkdir(parents=True, exist_ok=True)
            self._log_path = directory / EVENT_LOG_NAME
            self._replay()

    # -- event log ---------------------------------------------------------

    def _replay(self) -> None:
        assert self._log_path is not None
        if not self._log_path.exists():
            return
        with open(self._log_path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    event = AnnotationEvent.from_line(line)
                except (json.JSONDecodeError, KeyError) as exc:
                    raise DataError(f"{self._log_path}:{lineno}: corrupt event ({exc})") from exc
                if event.seq != self._seq + 1:
                    raise DataError(
                        f"{self._log_path}:{lineno}: sequence gap "
                        f"(expected {self._seq + 1}, got {event.seq})"
                    )
                self._apply(event)
                self._seq = event.seq

    def _apply(self, event: AnnotationEvent) -> None:
        if event.kind == KIND_SESSION_CREATED:
            payload = event.payload
            session = GaeSession(
                session_id=event.session_id,
                model_label=payload["model_label"],
                items=[SessionItem(**item) for item in payload["items"]],
            )
            self._sessions[session.session_id] = session
        elif event.kind in (KIND_SUBMITTED, KIND_REPLACED):
            session = self._sessions[event.session_id]
            session.upsert_annotation(gae.annotation_from_record(event.payload))
        else:
            raise DataError(f"unknown event kind {event.kind!r}")

    def _append(self, kind: str, session_id: str, payload: Mapping) -> AnnotationEvent:
        self._seq += 1
        event = AnnotationEvent(
            seq=self._seq,
            kind=kind,
            session_id=session_id,
            payload=payload,
            wall_time=_now(),
        )
        if self._log_path is not None:
            with open(self._log_path, "a", encoding="utf-8") as handle:
                handle.write(event.to_line() + "\n")
                handle.flush()
                os.fsync(handle.fileno())
        return event

    # -- operations ----------------------------------------------------------

    def has_session(self, session_id: str) -> bool:
        with self._lock:
            return session_id in self._sessions

    def get_session(self, session_id: str) -> GaeSession:
        session = self._sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        return session

    def session_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._sessions)

    def create_session(
        self,
        model_label: str,
        items: Sequence[SessionItem],
        session_id: str | None = None,
    ) -> str:
        with self._lock:
            sid = session_id or uuid.uuid4().hex[:12]
            if sid in self._sessions:
                raise ValidationError(f"session {sid!r} already exists")
            # Validates items (non-empty, unique ids) before anything is logged.
            session = GaeSession(session_id=sid, model_label=model_label, items=list(items))
            self._append(
                KIND_SESSION_CREATED,
                sid,
                {"model_label": model_label, "items": [i.as_dict() for i in items]},
            )
            self._sessions[sid] = session
            return sid

    def next_item(self, session_id: str, annotator_id: str) -> dict:
        with self._lock:
            session = self.get_session(session_id)
            completed = len(session.annotations_by(annotator_id))
            item = session.next_item(annotator_id)
            status: dict = {"completed": completed, "total": len(session.items)}
            if item is None:
                status["status"] = "done"
            else:
                status["status"] = "item"
                status["item"] = item.as_dict()
            return status

    def submit_annotation(self, session_id: str, annotation: GaeAnnotation) -> dict:
        """Upsert one annotation; identical payloads are acknowledged without a new event."""
        with self._lock:
            session = self.get_session(session_id)
            outcome = session.upsert_annotation(annotation)
            if outcome == "submitted":
                self._append(KIND_SUBMITTED, session_id, gae.annotation_to_record(annotation))
            elif outcome == "replaced":
                self._append(KIND_REPLACED, session_id, gae.annotation_to_record(annotation))
            return {
                "sentence_id": annotation.sentence_id,
                "sentence_score": gae.sentence_score(annotation),
            }

    def session_metadata(self, session_id: str) -> dict:
        with self._lock:
            session = self.get_session(session_id)
            return {
                "session_id": session.session_id,
                "model_label": session.model_label,
                "item_count": len(session.items),
                "completion": session.completion(),
            }

    def session_scores(self, session_id: str) -> dict:
        with self._lock:
            session = self.get_session(session_id)
            pooled = gae.pooled_scores(session)
            return {
                "session_id": session.session_id,
                "item_count": len(session.items),
                "completion": session.completion(),
                "per_annotator": {
                    annotator: table.as_dict()
                    for annotator, table in pooled.per_annotator.items()
                },
                "pooled": pooled.pooled.as_dict() if pooled.pooled else None,
                "agreement": (
                    {c.key: v for c, v in pooled.agreement.items()}
                    if pooled.agreement
                    else None
                ),
            }

    def export_lines(self, session_id: str) -> list[str]:
        with self._lock:
            session = self.get_session(session_id)
            return [gae.annotation_to_line(a) for a in session.annotations]


# --- HTTP surface -----------------------------------------------------------


class ItemIn(BaseModel):
    sentence_id: str
    source_text: str
    reference_text: str
    candidate_text: str


class SessionIn(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_label: str
    items: list[ItemIn]


class AnnotationIn(BaseModel):
    sentence_id: str
    annotator_id: str
    judgments: dict[str, int]
    timestamp: str | None = None
    comment: str | None = None


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="mteval annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(NotFoundError)
    async def not_found(_: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ValidationError)
    async def invalid(_: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/categories")
    def categories():
        return [
            {"key": c.key, "label": c.label, "criterion": c.criterion}
            for c in gae.CATEGORIES
        ]

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionIn):
        session_id = store.create_session(
            body.model_label,
            [SessionItem(**item.model_dump()) for item in body.items],
        )
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def session_metadata(session_id: str):
        return store.session_metadata(session_id)

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str, annotator: str = Query(...)):
        return store.next_item(session_id, annotator)

    @app.put("/sessions/{session_id}/annotations")
    def submit(session_id: str, body: AnnotationIn):
        annotation = GaeAnnotation(
            sentence_id=body.sentence_id,
            annotator_id=body.annotator_id,
            judgments=body.judgments,
            timestamp=body.timestamp or _now(),
            comment=body.comment,
        )
        return store.submit_annotation(session_id, annotation)

    @app.get("/sessions/{session_id}/scores")
    def scores(session_id: str):
        return store.session_scores(session_id)

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str):
        lines = store.export_lines(session_id)
        return PlainTextResponse("".join(line + "\n" for line in lines))

    return app
