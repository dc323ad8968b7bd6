"""HTTP session service around the construction pipeline.

Endpoints:
    POST /sessions                            create a session
    POST /sessions/{id}/updateMetamodel       run one update/feedback step
    GET  /sessions/{id}/metamodel?format=...  current document (ecore|puml)
    GET  /sessions/{id}/history               iteration accounting rows
    POST /evaluate                            score candidate vs reference
    POST /updateMetamodel                     alias on the "default" session
    GET  /getCurrentMetamodel                 alias on the "default" session

Sessions live in memory; with MF_DATA_DIR set, every mutation also writes
a JSON snapshot that is reloaded on startup. Mutations on one session are
serialized by a per-session lock; distinct sessions proceed concurrently.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .diagnostics import SyntaxDiagnosticError
from .ecore import emit_ecore, parse_ecore
from .evaluation import compare, report_to_dict
from .gateway import FixtureMissError, TransportError, UnusableOutputError
from .model import InvalidMetamodelError, MergeError
from .pipeline import (
    STEP_FEEDBACK,
    STEP_UPDATE,
    IterationRecord,
    ModelOutputError,
    Pipeline,
    PipelineConfig,
)
from .puml import emit_puml

DEFAULT_SESSION_ID = "default"

ENV_PORT = "MF_PORT"
ENV_DATA_DIR = "MF_DATA_DIR"
ENV_UI_ORIGIN = "MF_UI_ORIGIN"


class UpdateRequest(BaseModel):
    requirements: str
    step: Literal["update", "feedback"] = STEP_UPDATE


class EvaluateRequest(BaseModel):
    candidateEcore: str
    referenceEcore: str


@dataclass
class Session:
    id: str
    pipeline: Pipeline
    created_at: str
    lock: threading.Lock = field(default_factory=threading.Lock)


def _record_row(record: IterationRecord) -> dict:
    return {
        "step": record.step,
        "requirementCount": record.requirement_count,
        "promptTokens": record.prompt_tokens,
        "completionTokens": record.completion_tokens,
        "tokens": record.tokens,
        "wallSeconds": record.wall_seconds,
        "warnings": list(record.warnings),
    }


class SessionStore:
    """In-memory sessions with optional JSON snapshots under data_dir."""

    def __init__(self, config: PipelineConfig, data_dir: str | Path | None = None):
        self.config = config
        self.data_dir = Path(data_dir) if data_dir else None
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._load_snapshots()

    def create(self, session_id: str | None = None) -> Session:
        session = Session(
            id=session_id or uuid.uuid4().hex,
            pipeline=Pipeline(self.config),
            created_at=datetime.now(timezone.utc).isoformat(),
        )
        with self._lock:
            self._sessions[session.id] = session
        self.persist(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session '{session_id}'")
        return session

    def get_or_create_default(self) -> Session:
        with self._lock:
            session = self._sessions.get(DEFAULT_SESSION_ID)
        if session is not None:
            return session
        return self.create(DEFAULT_SESSION_ID)

    def persist(self, session: Session) -> None:
        if self.data_dir is None:
            return
        payload = {
            "sessionId": session.id,
            "createdAt": session.created_at,
            "history": [
                {**_record_row(record), "snapshotEcore": emit_ecore(record.snapshot)}
                for record in session.pipeline.records
            ],
        }
        path = self.data_dir / f"{session.id}.json"
        path.write_text(json.dumps(payload, indent=2), encoding="utf-8")

    def _load_snapshots(self) -> None:
        for path in sorted(self.data_dir.glob("*.json")):
            try:
                payload = json.loads(path.read_text(encoding="utf-8"))
                history = payload["history"]
                pipeline = Pipeline(self.config)
                records = []
                for row in history:
                    snapshot = parse_ecore(row["snapshotEcore"]).metamodel
                    records.append(IterationRecord(
                        step=row["step"],
                        requirement_count=row["requirementCount"],
                        prompt_tokens=row["promptTokens"],
                        completion_tokens=row["completionTokens"],
                        wall_seconds=row["wallSeconds"],
                        warnings=tuple(row.get("warnings", [])),
                        snapshot=snapshot,
                    ))
                if not records:
                    continue
                pipeline.records = records
                pipeline.current = records[-1].snapshot
                session = Session(payload["sessionId"], pipeline, payload["createdAt"])
                self._sessions[session.id] = session
            except (KeyError, ValueError, OSError):
                continue  # a corrupt snapshot never blocks startup


def create_app(config: PipelineConfig | None = None,
               data_dir: str | Path | None = None,
               ui_origin: str | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    if config is None:
        config = PipelineConfig.from_env()
    if data_dir is None:
        data_dir = os.environ.get(ENV_DATA_DIR) or None
    store = SessionStore(config, data_dir)

    app = FastAPI(title="metaforge session service", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[ui_origin or os.environ.get(ENV_UI_ORIGIN, "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def run_update(session: Session, body: UpdateRequest) -> dict:
        if not body.requirements.strip():
            raise HTTPException(status_code=422, detail="requirements must be non-empty")
        if body.step not in (STEP_UPDATE, STEP_FEEDBACK):
            raise HTTPException(status_code=422, detail=f"unknown step '{body.step}'")
        with session.lock:
            try:
                record = session.pipeline.run_iteration(body.requirements, body.step)
            except (TransportError, FixtureMissError) as exc:
                raise HTTPException(status_code=502, detail=str(exc)) from exc
            except (UnusableOutputError, ModelOutputError) as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            except MergeError as exc:
                raise HTTPException(status_code=409, detail=exc.violations) from exc
            store.persist(session)
            return {"ecore": emit_ecore(session.pipeline.current), "warnings": list(record.warnings)}

    def render_current(session: Session, fmt: str) -> Response:
        with session.lock:
            current = session.pipeline.current
        if fmt == "ecore":
            return Response(emit_ecore(current), media_type="application/xml")
        if fmt == "puml":
            return Response(emit_puml(current), media_type="text/plain")
        raise HTTPException(status_code=422, detail=f"unknown format '{fmt}'")

    @app.post("/sessions", status_code=201)
    def create_session() -> dict:
        session = store.create()
        return {"sessionId": session.id, "createdAt": session.created_at}

    @app.post("/sessions/{session_id}/updateMetamodel")
    def update_metamodel(session_id: str, body: UpdateRequest) -> dict:
        return run_update(store.get(session_id), body)

    @app.get("/sessions/{session_id}/metamodel")
    def get_metamodel(session_id: str, format: str = Query("ecore")) -> Response:
        return render_current(store.get(session_id), format)

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str) -> list[dict]:
        session = store.get(session_id)
        with session.lock:
            return [_record_row(record) for record in session.pipeline.records]

    @app.post("/evaluate")
    def evaluate(body: EvaluateRequest) -> dict:
        try:
            candidate = parse_ecore(body.candidateEcore).metamodel
            reference = parse_ecore(body.referenceEcore).metamodel
        except (SyntaxDiagnosticError, InvalidMetamodelError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return report_to_dict(compare(candidate, reference))

    # Aliases matching the original two-endpoint prototype, bound to an
    # implicit default session.
    @app.post("/updateMetamodel")
    def update_default(body: UpdateRequest) -> dict:
        return run_update(store.get_or_create_default(), body)

    @app.get("/getCurrentMetamodel")
    def get_default(format: str = Query("puml")) -> Response:
        return render_current(store.get_or_create_default(), format)

    if ui_dir is None:
        candidate_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = candidate_dir if candidate_dir.is_dir() else None
    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def main() -> None:
    import uvicorn

    port = int(os.environ.get(ENV_PORT, "8080"))
    uvicorn.run(create_app(), host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
