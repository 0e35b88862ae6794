"""HTTP service exposing chat sessions, supervisor labeling, KB admin,
and a line-delimited event stream."""

from __future__ import annotations

import queue
from contextlib import asynccontextmanager
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ethichat.errors import (
    EthichatError,
    NoConsistentRevision,
    NoConsistentRule,
    NoHeadMode,
    ParseError,
    PipelineTimeout,
    UnknownCase,
)
from ethichat.asp.parser import parse_atom
from ethichat.asp.syntax import print_program
from ethichat.asp.explain import Verdict
from ethichat.config import ServiceConfig
from ethichat.engine import CaseStatus, EvaluationEngine
from ethichat.events import EventBus
from ethichat.learn import load_modes
from ethichat.runtime import Pipeline, ResponderScript, spawn_pipeline
from ethichat.translate import PatternTable


def verdict_body(verdict: Verdict, case_id: str = "") -> dict:
    body = {
        "verdict": verdict.kind,
        "subject": str(verdict.subject) if verdict.subject else None,
        "reason": verdict.reason,
        "text": verdict.render(),
        "justification": verdict.justification.render() if verdict.justification else "",
    }
    if case_id:
        body["caseId"] = case_id
    return body


@dataclass
class SessionRecord:
    session_id: str
    created_at: float = field(default_factory=time.time)
    transcript: list = field(default_factory=list)
    case_ids: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "sessionId": self.session_id,
            "createdAt": self.created_at,
            "transcript": [
                {"speaker": s, "text": t, "timestamp": ts} for s, t, ts in self.transcript
            ],
            "caseIds": list(self.case_ids),
        }


class ServiceState:
    def __init__(self, config: ServiceConfig):
        config.validate()
        self.config = config
        self.engine = EvaluationEngine.from_directory(
            config.kb_dir, modes=load_modes(config.modes_file)
        )
        self.patterns = PatternTable.load(config.patterns_file)
        self.responder = ResponderScript.load(config.responder_file)
        self.bus = EventBus()
        self.sessions: dict[str, SessionRecord] = {}
        self.pipelines: dict[str, Pipeline] = {}
        self._lock = threading.Lock()

    def open_session(self) -> SessionRecord:
        session_id = uuid.uuid4().hex[:12]
        record = SessionRecord(session_id)
        pipeline = spawn_pipeline(
            session_id,
            self.engine,
            self.responder,
            self.patterns,
            event_log_path=self.config.event_log,
            stage_deadline=self.config.stage_deadline,
        )
        with self._lock:
            self.sessions[session_id] = record
            self.pipelines[session_id] = pipeline
        return record

    def close(self):
        for pipeline in list(self.pipelines.values()):
            pipeline.shutdown()

    def publish_case_events(self, outcome) -> None:
        self.bus.publish("verdict", verdict_body(outcome.verdict, outcome.case_id))
        if outcome.alert is not None:
            self.bus.publish(
                "alert",
                {
                    "caseId": outcome.alert.case_id,
                    "subject": outcome.alert.subject,
                    "justification": outcome.alert.justification_text,
                },
            )
        if outcome.pending:
            case = self.engine.cases.get(outcome.case_id)
            self.bus.publish(
                "label_request",
                {
                    "caseId": outcome.case_id,
                    "facts": sorted(str(a) for a in case.facts) if case else [],
                    "candidates": self.engine.label_candidates(case) if case else [],
                },
            )

    def reevaluate_all(self) -> None:
        """After a KB change, re-solve every evaluated case and stream the
        verdicts so badges can flip."""
        for case in list(self.engine.cases.values()):
            if case.status is CaseStatus.PENDING_LABEL:
                continue
            try:
                verdict = self.engine.evaluate_case(case)
            except EthichatError:
                continue
            self.bus.publish("verdict", verdict_body(verdict, case.case_id))

    def kb_body(self) -> dict:
        kb = self.engine.kb
        return {
            "ontology": print_program(kb.ontology_facts),
            "codeRules": print_program(kb.code_rules),
            "learnedRules": print_program(kb.learned.as_program()),
            "version": kb.version,
        }


_FRONTEND_DIR = Path(__file__).resolve().parents[2] / "frontend" / "dist"


def create_app(config: ServiceConfig) -> FastAPI:
    state = ServiceState(config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        state.close()

    app = FastAPI(title="ethichat", lifespan=lifespan)
    app.state.ethichat = state

    @app.exception_handler(EthichatError)
    async def domain_error(request: Request, err: EthichatError):
        status = 500
        if isinstance(err, ParseError):
            status = 400
        elif isinstance(err, UnknownCase):
            status = 409
        return JSONResponse(status_code=status, content={"error": str(err)})

    @app.post("/api/session")
    def open_session():
        record = state.open_session()
        return {"sessionId": record.session_id}

    @app.get("/api/session/{session_id}")
    def get_session(session_id: str):
        record = state.sessions.get(session_id)
        if record is None:
            raise HTTPException(404, "unknown session")
        return record.to_json()

    @app.post("/api/session/{session_id}/message")
    def post_message(session_id: str, body: dict):
        record = state.sessions.get(session_id)
        pipeline = state.pipelines.get(session_id)
        if record is None or pipeline is None:
            raise HTTPException(404, "unknown session")
        text = body.get("text")
        if not isinstance(text, str) or not text.strip():
            raise HTTPException(400, "body must carry a non-empty 'text'")
        try:
            outcome = pipeline.run_turn(text)
        except PipelineTimeout as err:
            raise HTTPException(500, str(err))
        now = time.time()
        record.transcript.append(("client", text, now))
        record.transcript.append(("agent", outcome.answer, time.time()))
        record.case_ids.append(outcome.case_id)
        state.bus.publish(
            "turn",
            {
                "sessionId": session_id,
                "question": text,
                "answer": outcome.answer,
                "caseId": outcome.case_id,
            },
        )
        state.publish_case_events(outcome)
        return {
            "answer": outcome.answer,
            "caseId": outcome.case_id,
            "verdict": verdict_body(outcome.verdict, outcome.case_id),
            "pending": outcome.pending,
        }

    @app.get("/api/cases")
    def list_cases(status: str | None = None):
        cases = list(state.engine.cases.values())
        if status == "pending":
            cases = [c for c in cases if c.status is CaseStatus.PENDING_LABEL]
        elif status is not None:
            cases = [c for c in cases if c.status.value == status]
        return [
            {
                "caseId": c.case_id,
                "sessionId": c.session_id,
                "question": c.question,
                "answer": c.answer,
                "facts": sorted(str(a) for a in c.facts),
                "status": c.status.value,
                "verdict": verdict_body(c.verdict, c.case_id) if c.verdict else None,
                "candidates": state.engine.label_candidates(c),
            }
            for c in sorted(cases, key=lambda c: c.created_at)
        ]

    @app.post("/api/supervisor/label")
    def supervisor_label(body: dict):
        case_id = body.get("caseId")
        label = body.get("label")
        target = body.get("target")
        if not case_id or label not in ("ethical", "unethical") or not target:
            raise HTTPException(400, "body needs caseId, label (ethical|unethical), target")
        target_atom = parse_atom(target)
        try:
            kb, verdict = state.engine.apply_supervisor_label(case_id, label, target_atom)
        except (NoConsistentRule, NoConsistentRevision, NoHeadMode) as err:
            raise HTTPException(500, str(err))
        state.bus.publish("kb_updated", state.kb_body())
        state.bus.publish("verdict", verdict_body(verdict, case_id))
        return {
            "verdict": verdict_body(verdict, case_id),
            "learnedRules": print_program(kb.learned.as_program()),
            "kbVersion": kb.version,
        }

    @app.get("/api/kb")
    def get_kb():
        return state.kb_body()

    @app.post("/api/kb/facts")
    def add_fact(body: dict):
        fact = body.get("fact")
        if not fact:
            raise HTTPException(400, "body needs 'fact'")
        atom = parse_atom(fact)
        state.engine.assert_fact(atom)
        state.bus.publish("kb_updated", state.kb_body())
        state.reevaluate_all()
        return state.kb_body()

    @app.api_route("/api/kb/facts", methods=["DELETE"])
    def remove_fact(body: dict):
        fact = body.get("fact")
        if not fact:
            raise HTTPException(400, "body needs 'fact'")
        atom = parse_atom(fact)
        state.engine.retract_fact(atom)
        state.bus.publish("kb_updated", state.kb_body())
        state.reevaluate_all()
        return state.kb_body()

    @app.get("/api/events")
    def events(since: int = 0):
        backlog, live, unsubscribe = state.bus.subscribe(since)

        def stream():
            try:
                for envelope in backlog:
                    yield envelope.to_json() + "\n"
                while True:
                    try:
                        envelope = live.get(timeout=15.0)
                    except queue.Empty:
                        yield "\n"  # keep-alive
                        continue
                    yield envelope.to_json() + "\n"
            finally:
                unsubscribe()

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    if _FRONTEND_DIR.exists():
        app.mount("/", StaticFiles(directory=_FRONTEND_DIR, html=True), name="console")

    return app
