import pytest

from ethichat.errors import ArityError, UnknownCase
from ethichat.asp.parser import parse_atom, parse_program, parse_rule
from ethichat.asp.syntax import Program, print_program
from ethichat.engine import (
    CaseStatus,
    EvaluationEngine,
    KnowledgeBase,
    evaluate_facts,
    load_kb,
    save_kb,
)
from ethichat.learn import Hypothesis
from ethichat.translate import SpeakerRole, translate_sentence

E = "environmentally_friendly(productX)"
PAPER_RULE = parse_rule(
    "unethical(V1) :- sensitiveSlogan(V1), not relevant(V1), answer(V1)."
)


def scenario_kb(with_rule=True):
    learned = Hypothesis((PAPER_RULE,), version=1) if with_rule else Hypothesis()
    return KnowledgeBase(
        ontology_facts=parse_program(f"sensitiveSlogan({E})."), learned=learned
    )


def scenario_facts():
    return translate_sentence(
        "ProductX is environmentally friendly", SpeakerRole.SERVICE_AGENT
    ).facts


def test_evaluate_scenario_unethical():
    v = evaluate_facts(scenario_facts(), scenario_kb())
    assert v.is_unethical
    assert str(v.subject) == f"unethical({E})"


def test_evaluate_after_relevant_fact():
    kb = scenario_kb().with_fact(parse_atom(f"relevant({E})"))
    v = evaluate_facts(scenario_facts(), kb)
    assert v.is_unknown


def test_evaluate_without_rule_unknown():
    v = evaluate_facts(scenario_facts(), scenario_kb(with_rule=False))
    assert v.is_unknown
    assert v.reason == "no ethical/unethical literal derived"


def test_assert_fact_idempotent():
    kb = scenario_kb()
    kb2 = kb.with_fact(parse_atom(f"relevant({E})"))
    assert kb2.version == kb.version + 1
    kb3 = kb2.with_fact(parse_atom(f"relevant({E})"))
    assert kb3 is kb2  # same version, unchanged


def test_assert_fact_arity_check():
    kb = scenario_kb().with_fact(parse_atom(f"relevant({E})"))
    with pytest.raises(ArityError):
        kb.with_fact(parse_atom("relevant(x, y)"))


def test_retract_restores_fact_set():
    kb = scenario_kb()
    before = print_program(kb.ontology_facts)
    kb2 = kb.with_fact(parse_atom(f"relevant({E})"))
    kb3 = kb2.without_fact(parse_atom(f"relevant({E})"))
    assert print_program(kb3.ontology_facts) == before


def test_retract_absent_is_noop():
    kb = scenario_kb()
    assert kb.without_fact(parse_atom("relevant(x)")) is kb


def test_nonmonotonicity_witness():
    engine = EvaluationEngine(kb=scenario_kb())
    case = engine.submit_case("s", "q", "a", scenario_facts())
    assert case.verdict.is_unethical
    engine.assert_fact(parse_atom(f"relevant({E})"))
    assert engine.evaluate_case(case).is_unknown
    engine.retract_fact(parse_atom(f"relevant({E})"))
    assert engine.evaluate_case(case).is_unethical


def test_unknown_case_queued_with_candidates():
    engine = EvaluationEngine(kb=scenario_kb(with_rule=False))
    case = engine.submit_case("s", "q", "a", scenario_facts())
    assert case.status is CaseStatus.PENDING_LABEL
    assert case.case_id in engine.pending
    assert engine.label_candidates(case) == [
        f"unethical({E})",
        f"ethical({E})",
    ]


def test_pending_queue_idempotent():
    engine = EvaluationEngine(kb=scenario_kb(with_rule=False))
    case = engine.submit_case("s", "q", "a", scenario_facts())
    engine.handle_unknown(case)
    engine.handle_unknown(case)
    assert list(engine.pending) == [case.case_id]


def test_supervisor_label_learns_and_reevaluates():
    engine = EvaluationEngine(kb=scenario_kb(with_rule=False))
    case = engine.submit_case("s", "q", "a", scenario_facts())
    kb, verdict = engine.apply_supervisor_label(
        case.case_id, "unethical", parse_atom(f"unethical({E})")
    )
    assert verdict.is_unethical
    assert kb.learned.rules
    assert case.status is CaseStatus.EVALUATED
    assert case.case_id not in engine.pending
    # learning progress: the case never goes back to unknown
    assert not engine.evaluate_case(case).is_unknown


def test_supervisor_label_unknown_case():
    engine = EvaluationEngine(kb=scenario_kb(with_rule=False))
    with pytest.raises(UnknownCase):
        engine.apply_supervisor_label("nope", "unethical", parse_atom(f"unethical({E})"))


def test_kb_audit_log():
    engine = EvaluationEngine(kb=scenario_kb(with_rule=False))
    v0 = engine.kb.version
    engine.assert_fact(parse_atom("relevant(x)"))
    engine.retract_fact(parse_atom("relevant(x)"))
    case = engine.submit_case("s", "q", "a", scenario_facts())
    engine.apply_supervisor_label(case.case_id, "unethical", parse_atom(f"unethical({E})"))
    versions = [e.version for e in engine.kb_log]
    assert versions == [v0 + 1, v0 + 2, v0 + 3]
    assert [e.kind for e in engine.kb_log] == ["assert", "retract", "label"]


def test_kb_persistence_roundtrip(tmp_path):
    kb = scenario_kb()
    save_kb(tmp_path, kb, [])
    loaded, archive = load_kb(tmp_path)
    assert print_program(loaded.ontology_facts) == print_program(kb.ontology_facts)
    assert print_program(loaded.learned.as_program()) == print_program(
        kb.learned.as_program()
    )
    assert archive == []


def test_assert_retract_byte_identical_kb_files(tmp_path):
    engine = EvaluationEngine(kb=scenario_kb(), kb_dir=tmp_path)
    engine._persist()
    before = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    engine.assert_fact(parse_atom(f"relevant({E})"))
    engine.retract_fact(parse_atom(f"relevant({E})"))
    after = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert before == after


def test_verdict_pure_function_of_facts_and_version():
    kb = scenario_kb()
    a = evaluate_facts(scenario_facts(), kb)
    b = evaluate_facts(scenario_facts(), kb)
    assert a.render() == b.render()
