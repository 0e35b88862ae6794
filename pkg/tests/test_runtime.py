import uuid

import pytest

from ethichat.errors import ConfigError, RoutingError
from ethichat.asp.parser import parse_atom, parse_program, parse_rule
from ethichat.engine import EvaluationEngine, KnowledgeBase
from ethichat.learn import Hypothesis
from ethichat.runtime import (
    AgentMessage,
    AgentRole,
    LabelRequest,
    ResponderScript,
    TranslatedFacts,
    UserUtterance,
    ViolationAlert,
    spawn_pipeline,
)

E = "environmentally_friendly(productX)"
QUESTION = "what are the features of ProductX?"
ANSWER = "ProductX is environmentally friendly"


def make_engine(with_rule=True):
    learned = (
        Hypothesis(
            (parse_rule("unethical(V1) :- sensitiveSlogan(V1), not relevant(V1), answer(V1)."),),
            version=1,
        )
        if with_rule
        else Hypothesis()
    )
    kb = KnowledgeBase(
        ontology_facts=parse_program(f"sensitiveSlogan({E})."), learned=learned
    )
    return EvaluationEngine(kb=kb)


def make_responder():
    return ResponderScript([(QUESTION, ANSWER)])


@pytest.fixture
def pipeline():
    p = spawn_pipeline(uuid.uuid4().hex, make_engine(), make_responder())
    yield p
    p.shutdown()


def test_spawn_has_six_agents(pipeline):
    assert set(pipeline.agents) == set(AgentRole)
    assert all(agent.is_alive() for agent in pipeline.agents.values())


def test_duplicate_session_rejected(pipeline):
    with pytest.raises(ConfigError):
        spawn_pipeline(pipeline.session_id, make_engine(), make_responder())


def test_unethical_turn_alerts(pipeline):
    outcome = pipeline.run_turn(QUESTION)
    assert outcome.answer == ANSWER
    assert outcome.verdict.is_unethical
    assert outcome.alert is not None
    assert any(isinstance(x, ViolationAlert) for x in pipeline.supervisor_feed)
    kinds = [(r["sender"], r["recipient"], r["kind"]) for r in pipeline.event_log]
    assert ("MA", "ChA", "ViolationAlert") in kinds


def test_pre_rule_turn_pending():
    p = spawn_pipeline(uuid.uuid4().hex, make_engine(with_rule=False), make_responder())
    try:
        outcome = p.run_turn(QUESTION)
        assert outcome.pending
        assert outcome.verdict.is_unknown
        assert any(isinstance(x, LabelRequest) for x in p.supervisor_feed)
    finally:
        p.shutdown()


def test_chitchat_turn_no_alert(pipeline):
    outcome = pipeline.run_turn("tell me a joke")
    assert outcome.answer == "I do not know."
    assert outcome.verdict.is_unknown
    assert outcome.alert is None
    assert not outcome.pending


def test_causality_and_case_accounting(pipeline):
    turns = [QUESTION, "tell me a joke"] * 5
    case_ids = []
    for text in turns:
        outcome = pipeline.run_turn(text)
        case_ids.append(outcome.case_id)
    assert len(case_ids) == 10
    assert len(set(case_ids)) == 10  # exactly one case per answered turn
    order = {"ExtractedText": 0, "TranslatedFacts": 1, "EvaluationResult": 2, "ViolationAlert": 3}
    per_case: dict[str, list[int]] = {}
    for i, record in enumerate(pipeline.event_log):
        kind = record["kind"]
        if kind in order:
            case_id = record["payload"].get("caseId", "")
            per_case.setdefault(case_id or f"turn-{record['payload'].get('turnRef')}", [])
    # per-case ordering: indexes of pipeline stages strictly increase
    for case_id in case_ids:
        stages = [
            order[r["kind"]]
            for r in pipeline.event_log
            if r["kind"] in ("TranslatedFacts", "EvaluationResult", "ViolationAlert")
            and r["payload"].get("caseId") == case_id
        ]
        assert stages == sorted(stages)
    # no lost alerts: every unethical verdict has a ViolationAlert
    unethical = {
        r["payload"]["caseId"]
        for r in pipeline.event_log
        if r["kind"] == "EvaluationResult" and r["payload"]["verdict"] == "unethical"
    }
    alerted = {
        r["payload"]["caseId"]
        for r in pipeline.event_log
        if r["kind"] == "ViolationAlert"
    }
    assert unethical <= alerted


def test_dispatch_illegal_route(pipeline):
    msg = AgentMessage(
        msg_id=uuid.uuid4().hex,
        sender=AgentRole.CA,
        recipient=AgentRole.EEA,
        session_id=pipeline.session_id,
        payload=UserUtterance("hi"),
    )
    with pytest.raises(RoutingError):
        pipeline.dispatch(msg)


def test_dispatch_deduplicates_msg_id(pipeline):
    msg = AgentMessage(
        msg_id="fixed",
        sender=AgentRole.TATA,
        recipient=AgentRole.EEA,
        session_id=pipeline.session_id,
        payload=TranslatedFacts("case-x", "turn-x", ()),
    )
    assert pipeline.dispatch(msg) is True
    assert pipeline.dispatch(msg) is False
    log_ids = [r["msgId"] for r in pipeline.event_log]
    assert log_ids.count("fixed") == 1


def test_session_isolation():
    p1 = spawn_pipeline(uuid.uuid4().hex, make_engine(), make_responder())
    p2 = spawn_pipeline(uuid.uuid4().hex, make_engine(), make_responder())
    try:
        p1.run_turn(QUESTION)
        p2.run_turn("tell me a joke")
        assert all(r["sessionId"] == p1.session_id for r in p1.event_log)
        assert all(r["sessionId"] == p2.session_id for r in p2.event_log)
    finally:
        p1.shutdown()
        p2.shutdown()


def test_responder_script_file(tmp_path):
    path = tmp_path / "responder.txt"
    path.write_text("# canned\nhello => hi there\n")
    script = ResponderScript.load(path)
    assert script.answer("hello") == "hi there"
    assert script.answer("unknown text") == "I do not know."


def test_event_log_jsonl(tmp_path):
    log = tmp_path / "events.jsonl"
    p = spawn_pipeline(
        uuid.uuid4().hex, make_engine(), make_responder(), event_log_path=log
    )
    try:
        p.run_turn(QUESTION)
    finally:
        p.shutdown()
    import json

    lines = [json.loads(l) for l in log.read_text().splitlines()]
    assert len(lines) == len(p.event_log)
    assert all("msgId" in rec for rec in lines)
