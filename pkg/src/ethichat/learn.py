"""Mode-biased rule learning from supervisor-labeled cases.

Bottom-clause construction plus shortest-first subset search (cover
loop), with single-rule specialize/add revision when a new example
contradicts the installed hypothesis.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from itertools import combinations, product
from pathlib import Path

from ethichat.errors import (
    ConfigError,
    NoConsistentRevision,
    NoConsistentRule,
    NoHeadMode,
    SafetyError,
)
from ethichat.asp.syntax import Atom, Compound, Constant, Literal, Program, Rule, Variable
from ethichat.asp.parser import parse_atom
from ethichat.asp.ground import ground_program
from ethichat.asp.solve import stable_models

DEFAULT_BODY_CAP = 4
DEFAULT_CHAIN_DEPTH = 2


class Placement(enum.Enum):
    INPUT = "+"
    OUTPUT = "-"
    CONSTANT = "#"


@dataclass(frozen=True)
class ModeDeclaration:
    kind: str  # "head" | "body"
    predicate: str
    arg_modes: tuple  # of (Placement, type name)
    negatable: bool = False

    @property
    def arity(self) -> int:
        return len(self.arg_modes)


_MODE_RE = re.compile(
    r"mode(?P<kind>[hb])\(\s*(?P<pred>[a-z][A-Za-z0-9_]*)\s*"
    r"\(\s*(?P<args>[^)]*)\)\s*(?:,\s*(?P<flag>negatable))?\s*\)\s*\.?\s*$"
)


def parse_mode(line: str) -> ModeDeclaration:
    m = _MODE_RE.match(line.strip())
    if not m:
        raise ConfigError(f"bad mode declaration: {line!r}")
    kind = "head" if m.group("kind") == "h" else "body"
    arg_modes = []
    for part in m.group("args").split(","):
        part = part.strip()
        if not part:
            continue
        placement = {p.value: p for p in Placement}.get(part[0])
        if placement is None:
            raise ConfigError(f"bad argument mode {part!r} in {line!r}")
        arg_modes.append((placement, part[1:]))
    negatable = m.group("flag") is not None
    if negatable and kind == "head":
        raise ConfigError(f"head modes cannot be negatable: {line!r}")
    return ModeDeclaration(kind, m.group("pred"), tuple(arg_modes), negatable)


def load_modes(path: str | Path) -> list[ModeDeclaration]:
    modes = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            modes.append(parse_mode(line))
    return modes


DEFAULT_MODES = [
    parse_mode("modeh(unethical(+answer))"),
    parse_mode("modeb(sensitiveSlogan(+answer))"),
    parse_mode("modeb(answer(+answer))"),
    parse_mode("modeb(relevant(+answer), negatable)"),
]


class Label(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class LabeledExample:
    case_facts: frozenset
    target: Atom
    label: Label

    def __post_init__(self):
        object.__setattr__(self, "case_facts", frozenset(self.case_facts))

    def to_json(self) -> dict:
        return {
            "facts": sorted(str(a) for a in self.case_facts),
            "target": str(self.target),
            "label": self.label.value,
        }

    @classmethod
    def from_json(cls, record: dict) -> "LabeledExample":
        return cls(
            case_facts=frozenset(parse_atom(a) for a in record["facts"]),
            target=parse_atom(record["target"]),
            label=Label(record["label"]),
        )


def load_examples(path: str | Path) -> list[LabeledExample]:
    examples = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            examples.append(LabeledExample.from_json(json.loads(line)))
    return examples


@dataclass(frozen=True)
class Hypothesis:
    rules: tuple = ()
    version: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def as_program(self) -> Program:
        return Program(self.rules)


def _head_mode(target: Atom, modes) -> ModeDeclaration:
    for mode in modes:
        if mode.kind == "head" and mode.predicate == target.predicate and mode.arity == target.arity:
            return mode
    raise NoHeadMode(target.predicate)


class _VarPool:
    """Consistent ground-term -> variable mapping with per-variable types."""

    def __init__(self):
        self.by_term: dict = {}
        self.types: dict[str, str] = {}

    def bind(self, term, type_name: str) -> Variable:
        key = str(term)
        if key not in self.by_term:
            self.by_term[key] = Variable(f"V{len(self.by_term) + 1}")
        var = self.by_term[key]
        self.types.setdefault(var.name, type_name)
        return var

    def bound_terms(self, type_name: str) -> list:
        out = []
        for key, var in self.by_term.items():
            if self.types.get(var.name) == type_name:
                out.append((key, var))
        return sorted(out)


def build_bottom_clause(
    ex: LabeledExample,
    kb: Program,
    modes: list[ModeDeclaration],
    depth: int = DEFAULT_CHAIN_DEPTH,
) -> Rule:
    head_mode = _head_mode(ex.target, modes)
    pool = _VarPool()
    terms_by_key: dict = {}

    head_args = []
    for term, (placement, type_name) in zip(ex.target.args, head_mode.arg_modes):
        if placement is Placement.CONSTANT:
            head_args.append(term)
        else:
            head_args.append(pool.bind(term, type_name))
            terms_by_key[str(term)] = term
    head = Atom(ex.target.predicate, tuple(head_args))

    facts = set(ex.case_facts) | set(kb.facts())
    body: dict[str, Literal] = {}
    body_modes = [m for m in modes if m.kind == "body"]

    for _ in range(depth):
        new_bindings = []
        for mode in body_modes:
            for fact in sorted(facts, key=str):
                if fact.predicate != mode.predicate or fact.arity != mode.arity:
                    continue
                args = []
                ok = True
                for term, (placement, type_name) in zip(fact.args, mode.arg_modes):
                    if placement is Placement.CONSTANT:
                        args.append(term)
                    elif placement is Placement.INPUT:
                        if str(term) not in pool.by_term:
                            ok = False
                            break
                        args.append(pool.by_term[str(term)])
                    else:  # OUTPUT introduces or reuses a binding
                        new_bindings.append((term, type_name))
                        args.append(pool.bind(term, type_name))
                        terms_by_key[str(term)] = term
                if ok:
                    lit = Literal(Atom(fact.predicate, tuple(args)))
                    body[str(lit)] = lit
            if mode.negatable:
                input_types = [t for p, t in mode.arg_modes if p is not Placement.CONSTANT]
                candidate_terms = [
                    [terms_by_key[key] for key, _ in pool.bound_terms(t)] for t in input_types
                ]
                for combo in product(*candidate_terms):
                    ground = Atom(mode.predicate, tuple(combo))
                    if ground in facts:
                        continue
                    args = tuple(pool.by_term[str(t)] for t in combo)
                    lit = Literal(Atom(mode.predicate, args), negated=True)
                    body[str(lit)] = lit

    ordered = tuple(sorted(body.values(), key=str))
    return Rule(head, ordered)


def _solver_program(kb: Program, ex: LabeledExample, rules) -> Program:
    parts = list(kb.rules)
    parts.extend(Rule(a) for a in sorted(ex.case_facts, key=str))
    parts.extend(rules)
    return Program(tuple(parts))


def covers(rule_or_rules, ex: LabeledExample, kb: Program) -> bool:
    """Credulous coverage: target holds in some stable model of kb + facts + rules."""
    rules = rule_or_rules if isinstance(rule_or_rules, (list, tuple)) else [rule_or_rules]
    program = _solver_program(kb, ex, rules)
    models = stable_models(ground_program(program))
    return any(ex.target in m for m in models)


def _is_safe(rule: Rule) -> bool:
    try:
        rule.check_safety()
        return True
    except SafetyError:
        return False


def _subset_search(
    bottom: Rule,
    seed: LabeledExample,
    negatives: list[LabeledExample],
    kb: Program,
    body_cap: int,
) -> Rule | None:
    literals = sorted(bottom.body, key=str)
    for size in range(0, min(body_cap, len(literals)) + 1):
        for combo in combinations(literals, size):
            candidate = Rule(bottom.head, combo)
            if not _is_safe(candidate):
                continue
            if not covers(candidate, seed, kb):
                continue
            if any(covers(candidate, n, kb) for n in negatives):
                continue
            return candidate
    return None


def learn_rules(
    positives: list[LabeledExample],
    negatives: list[LabeledExample],
    kb: Program,
    modes: list[ModeDeclaration],
    body_cap: int = DEFAULT_BODY_CAP,
    depth: int = DEFAULT_CHAIN_DEPTH,
    version: int = 1,
) -> Hypothesis:
    if not positives:
        raise ValueError("at least one positive example is required")
    learned: list[Rule] = []
    covered = [False] * len(positives)
    while not all(covered):
        seed_index = covered.index(False)
        seed = positives[seed_index]
        bottom = build_bottom_clause(seed, kb, modes, depth)
        rule = _subset_search(bottom, seed, negatives, kb, body_cap)
        if rule is None:
            raise NoConsistentRule(seed.to_json())
        learned.append(rule)
        for i, pos in enumerate(positives):
            if not covered[i] and covers(learned, pos, kb):
                covered[i] = True
    return Hypothesis(tuple(learned), version=version)


def classify(h: Hypothesis, ex: LabeledExample, kb: Program) -> bool:
    return covers(list(h.rules), ex, kb)


def _consistent(h: Hypothesis, examples: list[LabeledExample], kb: Program) -> bool:
    for ex in examples:
        hit = classify(h, ex, kb)
        if ex.label is Label.POSITIVE and not hit:
            return False
        if ex.label is Label.NEGATIVE and hit:
            return False
    return True


def revise_hypothesis(
    h: Hypothesis,
    new_ex: LabeledExample,
    archive: list[LabeledExample],
    kb: Program,
    modes: list[ModeDeclaration],
    body_cap: int = DEFAULT_BODY_CAP,
    depth: int = DEFAULT_CHAIN_DEPTH,
) -> Hypothesis:
    hit = classify(h, new_ex, kb)
    correct = hit if new_ex.label is Label.POSITIVE else not hit
    if correct:
        return h

    full = archive + [new_ex]
    if new_ex.label is Label.NEGATIVE:
        revised = _specialize(h, new_ex, archive, kb, modes, body_cap, depth)
        if revised is not None and _consistent(revised, full, kb):
            return revised
    else:
        added = _add_rule(h, new_ex, archive, kb, modes, body_cap, depth)
        if added is not None and _consistent(added, full, kb):
            return added

    # fallback: re-learn from the complete archive snapshot
    positives = [e for e in full if e.label is Label.POSITIVE]
    negatives = [e for e in full if e.label is Label.NEGATIVE]
    if positives:
        try:
            relearned = learn_rules(
                positives, negatives, kb, modes, body_cap, depth, version=h.version + 1
            )
            return relearned
        except NoConsistentRule as err:
            raise NoConsistentRevision(str(err)) from err
    raise NoConsistentRevision("no positive examples to relearn from")


def _specialize(h, new_ex, archive, kb, modes, body_cap, depth):
    offending = [i for i, r in enumerate(h.rules) if covers(r, new_ex, kb)]
    if not offending:
        return None
    rules = list(h.rules)
    for i in offending:
        rule = rules[i]
        seeds = [
            e for e in archive if e.label is Label.POSITIVE and covers(rule, e, kb)
        ]
        bottom_body: list[Literal] = []
        if seeds:
            bottom = build_bottom_clause(seeds[0], kb, modes, depth)
            bottom_body = [l for l in sorted(bottom.body, key=str) if l not in rule.body]
        found = None
        for extra_size in range(1, len(bottom_body) + 1):
            for extra in combinations(bottom_body, extra_size):
                candidate = Rule(rule.head, tuple(sorted(rule.body + extra, key=str)))
                if not _is_safe(candidate):
                    continue
                if covers(candidate, new_ex, kb):
                    continue
                if all(covers(candidate, s, kb) for s in seeds):
                    found = candidate
                    break
            if found:
                break
        if found is None:
            return None
        rules[i] = found
    return Hypothesis(tuple(rules), version=h.version + 1)


def _add_rule(h, new_ex, archive, kb, modes, body_cap, depth):
    negatives = [e for e in archive if e.label is Label.NEGATIVE]
    try:
        bottom = build_bottom_clause(new_ex, kb, modes, depth)
    except NoHeadMode:
        raise
    rule = _subset_search(bottom, new_ex, negatives, kb, body_cap)
    if rule is None:
        return None
    return Hypothesis(h.rules + (rule,), version=h.version + 1)
