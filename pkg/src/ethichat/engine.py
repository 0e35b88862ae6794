"""Knowledge-base owner: case evaluation, fact assertion, supervisor
labeling with incremental learning, and file persistence.

All mutations are serialized through one engine instance (single
writer); evaluation itself is a pure function of (facts, kb snapshot).
"""

from __future__ import annotations

import enum
import json
import os
import tempfile
import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path

from ethichat.errors import ArityError, EthichatError, NoHeadMode, UnknownCase
from ethichat.asp.syntax import Atom, Program, Rule, print_program
from ethichat.asp.parser import parse_program
from ethichat.asp.ground import ground_program
from ethichat.asp.solve import stable_models
from ethichat.asp.explain import Verdict, extract_verdict, unknown
from ethichat.learn import (
    Hypothesis,
    Label,
    LabeledExample,
    ModeDeclaration,
    DEFAULT_MODES,
    learn_rules,
    revise_hypothesis,
)


@dataclass(frozen=True)
class KnowledgeBase:
    ontology_facts: Program = field(default_factory=Program)
    code_rules: Program = field(default_factory=Program)
    learned: Hypothesis = field(default_factory=Hypothesis)
    version: int = 0

    def as_program(self) -> Program:
        return self.ontology_facts + self.code_rules + self.learned.as_program()

    def with_fact(self, fact: Atom) -> "KnowledgeBase":
        if not fact.is_ground():
            raise ValueError(f"fact {fact} is not ground")
        seen = self.as_program().signature.get(fact.predicate)
        if seen is not None and seen != fact.arity:
            raise ArityError(fact.predicate, {seen, fact.arity})
        if fact in self.ontology_facts.facts():
            return self
        rules = self.ontology_facts.rules + (Rule(fact),)
        return replace(
            self, ontology_facts=Program(rules), version=self.version + 1
        )

    def without_fact(self, fact: Atom) -> "KnowledgeBase":
        kept = tuple(r for r in self.ontology_facts.rules if r.head != fact or not r.is_fact())
        if len(kept) == len(self.ontology_facts.rules):
            return self
        return replace(self, ontology_facts=Program(kept), version=self.version + 1)

    def with_hypothesis(self, h: Hypothesis) -> "KnowledgeBase":
        return replace(self, learned=h, version=self.version + 1)


class CaseStatus(enum.Enum):
    EVALUATED = "evaluated"
    PENDING_LABEL = "pending_label"
    ERRORED = "errored"


@dataclass
class CaseScenario:
    case_id: str
    session_id: str
    question: str
    answer: str
    facts: frozenset
    status: CaseStatus = CaseStatus.EVALUATED
    verdict: Verdict | None = None
    error: str = ""
    created_at: float = field(default_factory=time.time)

    @property
    def answered_propositions(self) -> list:
        """Reified answer(P) payloads, the candidate verdict subjects."""
        return sorted(
            (a.args[0] for a in self.facts if a.predicate == "answer" and a.args),
            key=str,
        )


def evaluate_facts(facts, kb: KnowledgeBase) -> Verdict:
    """Pure evaluation of a set of ground case facts against a kb snapshot."""
    rules = list(kb.as_program().rules)
    rules.extend(Rule(a) for a in sorted(facts, key=str))
    program = ground_program(Program(tuple(rules)))
    models = stable_models(program)
    return extract_verdict(models, program)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


ONTOLOGY_FILE = "ontology.lp"
CODE_RULES_FILE = "code_rules.lp"
LEARNED_RULES_FILE = "learned_rules.lp"
ARCHIVE_FILE = "examples.jsonl"


def load_kb(directory: str | Path) -> tuple[KnowledgeBase, list[LabeledExample]]:
    directory = Path(directory)

    def read_program(name):
        path = directory / name
        return parse_program(path.read_text()) if path.exists() else Program()

    learned_program = read_program(LEARNED_RULES_FILE)
    kb = KnowledgeBase(
        ontology_facts=read_program(ONTOLOGY_FILE),
        code_rules=read_program(CODE_RULES_FILE),
        learned=Hypothesis(learned_program.rules, version=1 if learned_program.rules else 0),
    )
    archive = []
    archive_path = directory / ARCHIVE_FILE
    if archive_path.exists():
        for line in archive_path.read_text().splitlines():
            if line.strip():
                archive.append(LabeledExample.from_json(json.loads(line)))
    return kb, archive


def save_kb(directory: str | Path, kb: KnowledgeBase, archive) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _atomic_write(directory / ONTOLOGY_FILE, print_program(kb.ontology_facts) + "\n")
    _atomic_write(directory / CODE_RULES_FILE, print_program(kb.code_rules) + "\n")
    _atomic_write(
        directory / LEARNED_RULES_FILE, print_program(kb.learned.as_program()) + "\n"
    )
    _atomic_write(
        directory / ARCHIVE_FILE,
        "".join(json.dumps(ex.to_json()) + "\n" for ex in archive),
    )


@dataclass(frozen=True)
class KbEvent:
    kind: str  # "assert" | "retract" | "label"
    detail: str
    version: int


class EvaluationEngine:
    """Single-writer owner of the knowledge base and the case store."""

    def __init__(
        self,
        kb: KnowledgeBase | None = None,
        modes: list[ModeDeclaration] | None = None,
        kb_dir: str | Path | None = None,
        archive: list[LabeledExample] | None = None,
    ):
        self._lock = threading.RLock()
        self.kb = kb or KnowledgeBase()
        self.modes = modes or list(DEFAULT_MODES)
        self.kb_dir = Path(kb_dir) if kb_dir else None
        self.archive: list[LabeledExample] = list(archive or [])
        self.cases: dict[str, CaseScenario] = {}
        self.pending: dict[str, CaseScenario] = {}
        self.kb_log: list[KbEvent] = []

    @classmethod
    def from_directory(cls, kb_dir, modes=None) -> "EvaluationEngine":
        kb, archive = load_kb(kb_dir)
        return cls(kb=kb, modes=modes, kb_dir=kb_dir, archive=archive)

    def _persist(self):
        if self.kb_dir:
            save_kb(self.kb_dir, self.kb, self.archive)

    def _log(self, kind, detail):
        self.kb_log.append(KbEvent(kind, detail, self.kb.version))

    # -- evaluation ---------------------------------------------------------

    def evaluate_case(self, case: CaseScenario) -> Verdict:
        with self._lock:
            kb = self.kb
        try:
            verdict = evaluate_facts(case.facts, kb)
        except EthichatError as err:
            case.status = CaseStatus.ERRORED
            case.error = str(err)
            raise
        case.verdict = verdict
        case.status = CaseStatus.EVALUATED
        return verdict

    def submit_case(self, session_id, question, answer, facts, case_id=None) -> CaseScenario:
        case = CaseScenario(
            case_id=case_id or uuid.uuid4().hex[:12],
            session_id=session_id,
            question=question,
            answer=answer,
            facts=frozenset(facts),
        )
        with self._lock:
            self.cases[case.case_id] = case
        self.evaluate_case(case)
        if case.verdict.is_unknown and case.facts:
            self.handle_unknown(case)
        return case

    def handle_unknown(self, case: CaseScenario) -> CaseScenario:
        with self._lock:
            if case.case_id not in self.pending:
                case.status = CaseStatus.PENDING_LABEL
                self.pending[case.case_id] = case
        return case

    def label_candidates(self, case: CaseScenario) -> list[str]:
        out = []
        for prop in case.answered_propositions:
            out.append(f"unethical({prop})")
            out.append(f"ethical({prop})")
        return out

    # -- kb mutation --------------------------------------------------------

    def assert_fact(self, fact: Atom) -> KnowledgeBase:
        with self._lock:
            new = self.kb.with_fact(fact)
            if new is not self.kb:
                self.kb = new
                self._log("assert", str(fact))
                self._persist()
            return self.kb

    def retract_fact(self, fact: Atom) -> KnowledgeBase:
        with self._lock:
            new = self.kb.without_fact(fact)
            if new is not self.kb:
                self.kb = new
                self._log("retract", str(fact))
                self._persist()
            return self.kb

    # -- supervisor loop ----------------------------------------------------

    def apply_supervisor_label(
        self, case_id: str, label: str, target: Atom
    ) -> tuple[KnowledgeBase, Verdict]:
        with self._lock:
            case = self.pending.get(case_id)
            if case is None:
                raise UnknownCase(case_id)
            example = LabeledExample(
                case_facts=case.facts,
                target=target,
                label=Label.POSITIVE if label == "unethical" else Label.NEGATIVE,
            )
            # "unethical" is a positive example for the target; "ethical" is a
            # negative one (the supervisor denies the unethical candidate)
            new_hypothesis = self._learn_with(example)
            self.archive.append(example)
            if new_hypothesis is not None:
                self.kb = self.kb.with_hypothesis(new_hypothesis)
            else:
                self.kb = replace(self.kb, version=self.kb.version + 1)
            self._log("label", f"{case_id} {label} {target}")
            self._persist()
            del self.pending[case_id]
        try:
            verdict = self.evaluate_case(case)
        except EthichatError as err:
            case.status = CaseStatus.ERRORED
            case.error = str(err)
            raise
        return self.kb, verdict

    def _learn_with(self, example: LabeledExample) -> Hypothesis | None:
        """Revise or learn so the hypothesis stays consistent with the archive
        plus the new example; returns None when no rule change is needed."""
        background = self.kb.ontology_facts + self.kb.code_rules
        full = self.archive + [example]
        positives = [e for e in full if e.label is Label.POSITIVE]
        negatives = [e for e in full if e.label is Label.NEGATIVE]
        if not positives:
            return None
        if self.kb.learned.rules:
            revised = revise_hypothesis(
                self.kb.learned, example, list(self.archive), background, self.modes
            )
            return None if revised is self.kb.learned else revised
        return learn_rules(
            positives, negatives, background, self.modes,
            version=self.kb.learned.version + 1,
        )
