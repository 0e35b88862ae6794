"""Six-agent actor pipeline with typed messages and an observable event log.

Roles: client (CA), chatting (ChA), text extractor (TEA), translator
(TATA), evaluator (EEA), monitor (MA).  Each agent drains its mailbox
sequentially on its own thread; routing legality is enforced at
dispatch time.
"""

from __future__ import annotations

import enum
import json
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ethichat.errors import ConfigError, PipelineTimeout, RoutingError
from ethichat.asp.parser import parse_atom
from ethichat.asp.explain import Verdict
from ethichat.engine import CaseScenario, CaseStatus, EvaluationEngine
from ethichat.translate import (
    DialogueTurn,
    PatternTable,
    SpeakerRole,
    translate_turn,
)


class AgentRole(enum.Enum):
    CA = "CA"
    CHA = "ChA"
    TEA = "TEA"
    TATA = "TATA"
    EEA = "EEA"
    MA = "MA"


@dataclass(frozen=True)
class UserUtterance:
    text: str


@dataclass(frozen=True)
class AgentAnswer:
    text: str
    turn_ref: str


@dataclass(frozen=True)
class ExtractedText:
    turn_ref: str
    text: str


@dataclass(frozen=True)
class TranslatedFacts:
    case_id: str
    turn_ref: str
    atoms: tuple


@dataclass(frozen=True)
class EvaluationResult:
    case_id: str
    verdict: Verdict
    pending: bool


@dataclass(frozen=True)
class ViolationAlert:
    case_id: str
    subject: str
    justification_text: str


@dataclass(frozen=True)
class LabelRequest:
    case_id: str


@dataclass(frozen=True)
class AgentMessage:
    msg_id: str
    sender: AgentRole
    recipient: AgentRole
    session_id: str
    payload: object

    def log_record(self) -> dict:
        return {
            "ts": time.time(),
            "msgId": self.msg_id,
            "sender": self.sender.value,
            "recipient": self.recipient.value,
            "sessionId": self.session_id,
            "kind": type(self.payload).__name__,
            "payload": _payload_summary(self.payload),
        }


def _payload_summary(payload) -> dict:
    if isinstance(payload, UserUtterance):
        return {"text": payload.text}
    if isinstance(payload, AgentAnswer):
        return {"text": payload.text, "turnRef": payload.turn_ref}
    if isinstance(payload, ExtractedText):
        return {"turnRef": payload.turn_ref, "text": payload.text}
    if isinstance(payload, TranslatedFacts):
        return {
            "caseId": payload.case_id,
            "turnRef": payload.turn_ref,
            "atoms": [str(a) for a in payload.atoms],
        }
    if isinstance(payload, EvaluationResult):
        return {
            "caseId": payload.case_id,
            "verdict": payload.verdict.kind,
            "pending": payload.pending,
        }
    if isinstance(payload, ViolationAlert):
        return {"caseId": payload.case_id, "subject": payload.subject}
    if isinstance(payload, LabelRequest):
        return {"caseId": payload.case_id}
    return {}


ROUTING_TABLE = {
    (AgentRole.CA, AgentRole.CHA): {UserUtterance},
    (AgentRole.CHA, AgentRole.CA): {AgentAnswer},
    (AgentRole.CHA, AgentRole.TEA): {AgentAnswer},
    (AgentRole.TEA, AgentRole.TATA): {ExtractedText},
    (AgentRole.TATA, AgentRole.EEA): {TranslatedFacts},
    (AgentRole.EEA, AgentRole.MA): {EvaluationResult},
    (AgentRole.MA, AgentRole.CHA): {ViolationAlert},
}


class ResponderScript:
    """Pattern -> canned-answer table standing in for the monitored chatbot."""

    def __init__(self, entries: list[tuple[str, str]]):
        self.entries = entries

    @classmethod
    def load(cls, path: str | Path) -> "ResponderScript":
        entries = []
        for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=>" not in line:
                raise ConfigError(f"{path}:{n}: expected 'PATTERN => ANSWER'")
            pattern, answer = (part.strip() for part in line.split("=>", 1))
            entries.append((pattern, answer))
        return cls(entries)

    def answer(self, question: str) -> str:
        normalized = question.strip().rstrip(".?!").lower()
        for pattern, answer in self.entries:
            if pattern.strip().rstrip(".?!").lower() == normalized:
                return answer
        return "I do not know."


@dataclass
class TurnOutcome:
    turn_ref: str
    question: str = ""
    answer: str = ""
    case_id: str = ""
    verdict: Verdict | None = None
    pending: bool = False
    alert: ViolationAlert | None = None
    _answer_done: threading.Event = field(default_factory=threading.Event)
    _eval_done: threading.Event = field(default_factory=threading.Event)


class _Agent(threading.Thread):
    def __init__(self, role: AgentRole, pipeline: "Pipeline"):
        super().__init__(name=f"{pipeline.session_id}-{role.value}", daemon=True)
        self.role = role
        self.pipeline = pipeline
        self.mailbox: queue.Queue = queue.Queue()

    def run(self):
        while True:
            msg = self.mailbox.get()
            if msg is None:
                return
            try:
                for out in self.handle(msg):
                    self.pipeline.dispatch(out)
            except Exception as err:  # dead-letter, never kill the loop
                self.pipeline.dead_letters.append((msg, err))

    def handle(self, msg: AgentMessage) -> list[AgentMessage]:
        return []

    def send(self, recipient: AgentRole, payload) -> AgentMessage:
        return AgentMessage(
            msg_id=uuid.uuid4().hex,
            sender=self.role,
            recipient=recipient,
            session_id=self.pipeline.session_id,
            payload=payload,
        )


class _ClientAgent(_Agent):
    def handle(self, msg):
        if isinstance(msg.payload, AgentAnswer):
            outcome = self.pipeline.turns.get(msg.payload.turn_ref)
            if outcome:
                outcome.answer = msg.payload.text
                outcome._answer_done.set()
        return []


class _ChattingAgent(_Agent):
    def handle(self, msg):
        if isinstance(msg.payload, UserUtterance):
            turn_ref = self.pipeline.current_turn_ref
            answer = AgentAnswer(
                self.pipeline.responder.answer(msg.payload.text), turn_ref
            )
            return [
                self.send(AgentRole.CA, answer),
                self.send(AgentRole.TEA, answer),
            ]
        if isinstance(msg.payload, ViolationAlert):
            self.pipeline.cha_alerts.append(msg.payload)
        return []


class _ExtractorAgent(_Agent):
    def handle(self, msg):
        if isinstance(msg.payload, AgentAnswer):
            return [
                self.send(
                    AgentRole.TATA,
                    ExtractedText(msg.payload.turn_ref, msg.payload.text),
                )
            ]
        return []


class _TranslatorAgent(_Agent):
    def handle(self, msg):
        if isinstance(msg.payload, ExtractedText):
            turn = DialogueTurn(SpeakerRole.SERVICE_AGENT, msg.payload.text)
            results = translate_turn(turn, self.pipeline.patterns)
            atoms = tuple(a for r in results for a in r.facts)
            case_id = uuid.uuid4().hex[:12]
            return [
                self.send(
                    AgentRole.EEA,
                    TranslatedFacts(case_id, msg.payload.turn_ref, atoms),
                )
            ]
        return []


class _EvaluatorAgent(_Agent):
    def handle(self, msg):
        if isinstance(msg.payload, TranslatedFacts):
            outcome = self.pipeline.turns.get(msg.payload.turn_ref)
            case = self.pipeline.engine.submit_case(
                session_id=self.pipeline.session_id,
                question=outcome.question if outcome else "",
                answer=outcome.answer if outcome else msg.payload.turn_ref,
                facts=msg.payload.atoms,
                case_id=msg.payload.case_id,
            )
            return [
                self.send(
                    AgentRole.MA,
                    EvaluationResult(
                        case.case_id,
                        case.verdict,
                        pending=case.status is CaseStatus.PENDING_LABEL,
                    ),
                )
            ]
        return []


class _MonitorAgent(_Agent):
    def handle(self, msg):
        out = []
        if isinstance(msg.payload, EvaluationResult):
            result = msg.payload
            case = self.pipeline.engine.cases.get(result.case_id)
            outcome = None
            if case:
                outcome = self.pipeline.turns.get(
                    self.pipeline.case_turn.get(result.case_id, "")
                )
            if result.verdict.is_unethical:
                alert = ViolationAlert(
                    result.case_id,
                    str(result.verdict.subject),
                    result.verdict.justification.render()
                    if result.verdict.justification
                    else "",
                )
                self.pipeline.supervisor_feed.append(alert)
                # dispatched before the turn completes so no alert is lost
                self.pipeline.dispatch(self.send(AgentRole.CHA, alert))
                if outcome:
                    outcome.alert = alert
            elif result.pending:
                self.pipeline.supervisor_feed.append(LabelRequest(result.case_id))
            if outcome:
                outcome.case_id = result.case_id
                outcome.verdict = result.verdict
                outcome.pending = result.pending
                outcome._eval_done.set()
            for hook in self.pipeline.verdict_hooks:
                hook(result)
        return []


_AGENT_CLASSES = {
    AgentRole.CA: _ClientAgent,
    AgentRole.CHA: _ChattingAgent,
    AgentRole.TEA: _ExtractorAgent,
    AgentRole.TATA: _TranslatorAgent,
    AgentRole.EEA: _EvaluatorAgent,
    AgentRole.MA: _MonitorAgent,
}

_LIVE_SESSIONS: dict[str, "Pipeline"] = {}
_LIVE_LOCK = threading.Lock()


class Pipeline:
    def __init__(
        self,
        session_id: str,
        engine: EvaluationEngine,
        responder: ResponderScript,
        patterns: PatternTable | None = None,
        event_log_path: str | Path | None = None,
        stage_deadline: float = 5.0,
    ):
        self.session_id = session_id
        self.engine = engine
        self.responder = responder
        self.patterns = patterns or PatternTable.default()
        self.stage_deadline = stage_deadline
        self.event_log: list[dict] = []
        self.event_log_path = Path(event_log_path) if event_log_path else None
        self.dead_letters: list = []
        self.supervisor_feed: list = []
        self.cha_alerts: list[ViolationAlert] = []
        self.turns: dict[str, TurnOutcome] = {}
        self.case_turn: dict[str, str] = {}
        self.current_turn_ref: str = ""
        self.verdict_hooks: list = []
        self._seen_msg_ids: set[str] = set()
        self._turn_lock = threading.Lock()
        self.agents = {role: cls(role, self) for role, cls in _AGENT_CLASSES.items()}
        for agent in self.agents.values():
            agent.start()
        self._alive = True

    def dispatch(self, m: AgentMessage) -> bool:
        allowed = ROUTING_TABLE.get((m.sender, m.recipient), set())
        if type(m.payload) not in allowed:
            raise RoutingError(
                f"illegal route {m.sender.value} -> {m.recipient.value} "
                f"carrying {type(m.payload).__name__}"
            )
        if m.msg_id in self._seen_msg_ids:
            return False  # exactly-once delivery
        self._seen_msg_ids.add(m.msg_id)
        if isinstance(m.payload, TranslatedFacts):
            self.case_turn[m.payload.case_id] = m.payload.turn_ref
        record = m.log_record()
        self.event_log.append(record)
        if self.event_log_path:
            with open(self.event_log_path, "a") as f:
                f.write(json.dumps(record) + "\n")
        self.agents[m.recipient].mailbox.put(m)
        return True

    def run_turn(self, user_text: str) -> TurnOutcome:
        with self._turn_lock:
            turn_ref = uuid.uuid4().hex[:12]
            outcome = TurnOutcome(turn_ref=turn_ref, question=user_text)
            self.turns[turn_ref] = outcome
            self.current_turn_ref = turn_ref
            msg = AgentMessage(
                msg_id=uuid.uuid4().hex,
                sender=AgentRole.CA,
                recipient=AgentRole.CHA,
                session_id=self.session_id,
                payload=UserUtterance(user_text),
            )
            self.dispatch(msg)
            if not outcome._answer_done.wait(self.stage_deadline):
                raise PipelineTimeout(f"no answer within {self.stage_deadline}s")
            if not outcome._eval_done.wait(self.stage_deadline * 4):
                raise PipelineTimeout(f"no evaluation within {self.stage_deadline * 4}s")
            return outcome

    def shutdown(self):
        if not self._alive:
            return
        self._alive = False
        for agent in self.agents.values():
            agent.mailbox.put(None)
        with _LIVE_LOCK:
            _LIVE_SESSIONS.pop(self.session_id, None)


def spawn_pipeline(
    session_id: str,
    engine: EvaluationEngine,
    responder: ResponderScript,
    patterns: PatternTable | None = None,
    event_log_path: str | Path | None = None,
    stage_deadline: float = 5.0,
) -> Pipeline:
    with _LIVE_LOCK:
        if session_id in _LIVE_SESSIONS:
            raise ConfigError(f"session {session_id} already has a live pipeline")
        pipeline = Pipeline(
            session_id, engine, responder, patterns, event_log_path, stage_deadline
        )
        _LIVE_SESSIONS[session_id] = pipeline
        return pipeline
