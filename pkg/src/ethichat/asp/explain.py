"""Justifications and ethical verdicts extracted from answer sets."""

from __future__ import annotations

from dataclasses import dataclass, field

from ethichat.errors import InconsistentVerdict, NotDerived
from ethichat.asp.syntax import Atom, Compound, Constant, Program, Rule
from ethichat.asp.solve import AnswerSet

ETHICAL = "ethical"
UNETHICAL = "unethical"


@dataclass(frozen=True)
class JustificationStep:
    rule: Rule  # ground instance, with its original negated literals
    supporting_facts: frozenset
    default_assumptions: frozenset

    def render(self) -> str:
        lines = [str(self.rule)]
        for a in sorted(self.supporting_facts, key=str):
            lines.append(f"  supported by {a}")
        for a in sorted(self.default_assumptions, key=str):
            lines.append(f"  assuming not {a}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Justification:
    conclusion: Atom
    steps: tuple = ()

    def render(self) -> str:
        return "\n".join(step.render() for step in self.steps)


def _firing_order(s: AnswerSet, g: Program) -> dict:
    """First firing rule instance per derived atom, in fixpoint order."""
    fired: dict[Atom, Rule] = {}
    derived: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for rule in g.rules:
            if rule.head in derived:
                continue
            if any(n in s for n in rule.negative_body()):
                continue
            if all(p in derived for p in rule.positive_body()):
                fired[rule.head] = rule
                derived.add(rule.head)
                changed = True
    return fired


def justify(s: AnswerSet, g: Program, a: Atom) -> Justification:
    if a not in s:
        raise NotDerived(f"{a} is not in the answer set")
    fired = _firing_order(s, g)
    if a not in fired:
        raise NotDerived(f"{a} has no firing rule instance")

    steps = []
    visited: set[Atom] = set()

    def visit(atom: Atom):
        if atom in visited:
            return
        visited.add(atom)
        rule = fired[atom]
        for support in rule.positive_body():
            visit(support)
        if rule.is_fact() and atom is not a:
            return  # facts are leaves unless they are the conclusion itself
        steps.append(
            JustificationStep(
                rule=rule,
                supporting_facts=frozenset(rule.positive_body()),
                default_assumptions=frozenset(rule.negative_body()),
            )
        )

    visit(a)
    return Justification(conclusion=a, steps=tuple(steps))


@dataclass(frozen=True)
class Verdict:
    kind: str  # "unethical" | "ethical" | "unknown"
    subject: Atom | None = None
    justification: Justification | None = None
    reason: str = ""

    @property
    def is_unethical(self) -> bool:
        return self.kind == UNETHICAL

    @property
    def is_ethical(self) -> bool:
        return self.kind == ETHICAL

    @property
    def is_unknown(self) -> bool:
        return self.kind == "unknown"

    def render(self) -> str:
        if self.is_unknown:
            return f"verdict: unknown ({self.reason})"
        lines = [f"verdict: {self.kind}", f"subject: {self.subject}"]
        if self.justification:
            lines.append("because:")
            lines.extend("  " + l for l in self.justification.render().splitlines())
        return "\n".join(lines)


def unknown(reason: str) -> Verdict:
    return Verdict(kind="unknown", reason=reason)


def _check_consistency(model: AnswerSet) -> None:
    ethical_args = {a.args for a in model.atoms if a.predicate == ETHICAL}
    unethical_args = {a.args for a in model.atoms if a.predicate == UNETHICAL}
    both = ethical_args & unethical_args
    if both:
        subject = sorted(str(t[0]) if t else "" for t in both)[0]
        raise InconsistentVerdict(subject)


def extract_verdict(models: list[AnswerSet], g: Program) -> Verdict:
    """Credulous alarm for unethical, skeptical agreement for ethical."""
    if not models:
        return unknown("no answer set")
    for model in models:
        _check_consistency(model)

    for model in models:
        hits = sorted((a for a in model.atoms if a.predicate == UNETHICAL), key=str)
        if hits:
            subject = hits[0]
            return Verdict(
                kind=UNETHICAL,
                subject=subject,
                justification=justify(model, g, subject),
            )

    agreed = None
    for i, model in enumerate(models):
        hits = {a for a in model.atoms if a.predicate == ETHICAL}
        agreed = hits if i == 0 else agreed & hits
        if not agreed:
            break
    if agreed:
        subject = sorted(agreed, key=str)[0]
        return Verdict(
            kind=ETHICAL,
            subject=subject,
            justification=justify(models[0], g, subject),
        )
    return unknown("no ethical/unethical literal derived")
