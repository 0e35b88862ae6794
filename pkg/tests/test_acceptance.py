"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
status lines.
"""

import random
import time
import uuid

import pytest

from ethichat.asp.parser import parse_atom, parse_program, parse_rule
from ethichat.asp.syntax import print_program
from ethichat.asp.ground import ground_program
from ethichat.asp.solve import least_model, stable_models
from ethichat.engine import EvaluationEngine, KnowledgeBase, evaluate_facts
from ethichat.learn import (
    DEFAULT_MODES,
    Hypothesis,
    Label,
    LabeledExample,
    classify,
    covers,
    learn_rules,
)
from ethichat.runtime import ResponderScript, spawn_pipeline
from ethichat.translate import SpeakerRole, translate_sentence

from conftest import (
    oracle_stable_models,
    random_ground_program,
    random_positive_program,
    random_stratified_program,
    rules_as_triples,
)

E = "environmentally_friendly(productX)"
QUESTION = "what are the features of ProductX?"
ANSWER = "ProductX is environmentally friendly"
PAPER_RULE_TEXT = "unethical(V1) :- sensitiveSlogan(V1), not relevant(V1), answer(V1)."
PAPER_RULE = parse_rule(PAPER_RULE_TEXT)


def report(name, passed):
    print(f"\nACCEPTANCE {'PASS' if passed else 'FAIL'}: {name}")
    assert passed, name


def scenario_kb(with_rule=True):
    learned = Hypothesis((PAPER_RULE,), version=1) if with_rule else Hypothesis()
    return KnowledgeBase(
        ontology_facts=parse_program(f"sensitiveSlogan({E})."), learned=learned
    )


def scenario_facts():
    return translate_sentence(ANSWER, SpeakerRole.SERVICE_AGENT).facts


def test_scenario_exact():
    started = time.monotonic()
    verdict = evaluate_facts(scenario_facts(), scenario_kb())
    elapsed = time.monotonic() - started
    ok = (
        verdict.is_unethical
        and str(verdict.subject) == f"unethical({E})"
        and len(verdict.justification.steps) == 1
        and str(verdict.justification.steps[0].rule)
        == (
            f"unethical({E}) :- sensitiveSlogan({E}), "
            f"not relevant({E}), answer({E})."
        )
        and verdict.justification.steps[0].default_assumptions
        == {parse_atom(f"relevant({E})")}
        and verdict.justification.steps[0].supporting_facts
        == {parse_atom(f"sensitiveSlogan({E})"), parse_atom(f"answer({E})")}
        and elapsed < 1.0
    )
    report("scenario verdict with exact justification (<1s)", ok)


def test_scenario_reversal():
    started = time.monotonic()
    engine = EvaluationEngine(kb=scenario_kb())
    case = engine.submit_case("s", QUESTION, ANSWER, scenario_facts())
    before = case.verdict.is_unethical
    engine.assert_fact(parse_atom(f"relevant({E})"))
    during = engine.evaluate_case(case)
    engine.retract_fact(parse_atom(f"relevant({E})"))
    after = engine.evaluate_case(case)
    elapsed = time.monotonic() - started
    ok = (
        before
        and not during.is_unethical
        and after.is_unethical
        and elapsed < 1.0
    )
    report("relevance fact reverses and restores the verdict (<1s)", ok)


def test_solver_oracle_equivalence():
    rng = random.Random(20240823)
    started = time.monotonic()
    ok = True
    for _ in range(1000):
        g = random_ground_program(rng, max_atoms=8, max_rules=12, max_neg=3)
        got = {frozenset(m.atoms) for m in stable_models(g)}
        if got != oracle_stable_models(rules_as_triples(g)):
            ok = False
            break
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 60.0
    report(f"solver equals brute-force oracle on 1000 programs ({elapsed:.1f}s)", ok)


def test_positive_and_stratified_properties():
    rng = random.Random(17)
    ok = True
    for _ in range(200):
        g = random_positive_program(rng)
        models = stable_models(g)
        if len(models) != 1 or models[0].atoms != least_model(g).atoms:
            ok = False
            break
    if ok:
        for _ in range(200):
            g = random_stratified_program(rng)
            if len(stable_models(g)) != 1:
                ok = False
                break
    report("positive and stratified programs have the unique expected model", ok)


def _oracle_labeled_dataset(kb):
    """Synthesize cases and label each by solving with the target rule."""
    raw_cases = [
        ([E, f"answer({E})"], f"unethical({E})"),
        (["safe(productZ)", "answer(safe(productZ))"], "unethical(safe(productZ))"),
        ([E, f"answer({E})", "answer(cheap(productY))"], f"unethical({E})"),
        (
            ["safe(productZ)", "answer(safe(productZ))", f"answer({E})", E],
            "unethical(safe(productZ))",
        ),
        ([E, f"answer({E})", f"relevant({E})"], f"unethical({E})"),
        (["answer(cheap(productY))"], "unethical(cheap(productY))"),
        (
            ["safe(productZ)", "answer(safe(productZ))", "relevant(safe(productZ))"],
            "unethical(safe(productZ))",
        ),
        ([E], f"unethical({E})"),
    ]
    positives, negatives = [], []
    for facts, target in raw_cases:
        ex = LabeledExample(
            frozenset(parse_atom(f) for f in facts), parse_atom(target), Label.POSITIVE
        )
        if covers(PAPER_RULE, ex, kb):
            positives.append(ex)
        else:
            negatives.append(
                LabeledExample(ex.case_facts, ex.target, Label.NEGATIVE)
            )
    return positives, negatives


def test_learner_recovery():
    started = time.monotonic()
    kb = parse_program(f"sensitiveSlogan({E}).\nsensitiveSlogan(safe(productZ)).")
    positives, negatives = _oracle_labeled_dataset(kb)
    ok = len(positives) == 4 and len(negatives) == 4
    h = learn_rules(positives, negatives, kb, DEFAULT_MODES)
    ok = ok and len(h.rules) == 1
    learned = h.rules[0]
    # equivalence up to variable renaming and body order: single head variable
    # in both rules, so compare the canonical body literal set
    ok = ok and str(learned.head) == "unethical(V1)"
    ok = ok and {str(l) for l in learned.body} == {
        "sensitiveSlogan(V1)",
        "not relevant(V1)",
        "answer(V1)",
    }
    for ex in positives:
        ok = ok and classify(h, ex, kb)
    for ex in negatives:
        ok = ok and not classify(h, ex, kb)
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 10.0
    report("learner recovers the target rule from 4+4 oracle-labeled cases (<10s)", ok)


def test_pre_rule_supervisor_loop():
    started = time.monotonic()
    engine = EvaluationEngine(kb=scenario_kb(with_rule=False))
    pipeline = spawn_pipeline(
        uuid.uuid4().hex, engine, ResponderScript([(QUESTION, ANSWER)])
    )
    try:
        outcome = pipeline.run_turn(QUESTION)
        pending_ok = outcome.pending and outcome.verdict.is_unknown
        kb, verdict = engine.apply_supervisor_label(
            outcome.case_id, "unethical", parse_atom(f"unethical({E})")
        )
        elapsed = time.monotonic() - started
        ok = (
            pending_ok
            and bool(kb.learned.rules)
            and verdict.is_unethical
            and elapsed < 10.0
        )
    finally:
        pipeline.shutdown()
    report("pre-rule case pends, label learns a rule, re-evaluation alarms (<10s)", ok)


def test_pipeline_causality():
    engine = EvaluationEngine(kb=scenario_kb())
    pipeline = spawn_pipeline(
        uuid.uuid4().hex, engine, ResponderScript([(QUESTION, ANSWER)])
    )
    try:
        case_ids = [pipeline.run_turn(QUESTION).case_id for _ in range(10)]
        ok = len(set(case_ids)) == 10
        order = {"TranslatedFacts": 1, "EvaluationResult": 2, "ViolationAlert": 3}
        for case_id in case_ids:
            turn_ref = pipeline.case_turn[case_id]
            stages = []
            for record in pipeline.event_log:
                if record["kind"] == "ExtractedText" and record["payload"].get("turnRef") == turn_ref:
                    stages.append(0)
                elif record["kind"] in order and record["payload"].get("caseId") == case_id:
                    stages.append(order[record["kind"]])
            ok = ok and stages == [0, 1, 2, 3]  # strict causal order, alert present
        unethical_cases = {
            r["payload"]["caseId"]
            for r in pipeline.event_log
            if r["kind"] == "EvaluationResult" and r["payload"]["verdict"] == "unethical"
        }
        alerted = {
            r["payload"]["caseId"]
            for r in pipeline.event_log
            if r["kind"] == "ViolationAlert"
        }
        ok = ok and unethical_cases == set(case_ids) and unethical_cases <= alerted
    finally:
        pipeline.shutdown()
    report("10-turn session keeps causal order with zero lost alerts", ok)


def test_round_trips(tmp_path):
    rng = random.Random(99)
    ok = True
    # 50-program corpus: scenario program + generated ground programs
    corpus = [
        parse_program(
            f"sensitiveSlogan({E}).\nanswer({E}).\n{PAPER_RULE_TEXT}"
        )
    ]
    while len(corpus) < 50:
        corpus.append(random_ground_program(rng))
    for program in corpus:
        if parse_program(print_program(program)).rules != program.rules:
            ok = False
            break

    engine = EvaluationEngine(kb=scenario_kb(), kb_dir=tmp_path)
    engine._persist()
    before = {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())}
    engine.assert_fact(parse_atom(f"relevant({E})"))
    engine.retract_fact(parse_atom(f"relevant({E})"))
    after = {p.name: p.read_bytes() for p in sorted(tmp_path.iterdir())}
    ok = ok and before == after
    report("parse/print and assert/retract round-trips are identities", ok)
