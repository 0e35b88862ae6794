"""Pattern-based translation of chat sentences into ground facts.

A pattern table maps tokenized sentence templates with slots to fact
schemas; chatbot (service-agent) propositions are additionally reified
as answer(P) so evaluation rules can quantify over answers.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

from ethichat.errors import ConfigError, UnmappableToken
from ethichat.asp.syntax import Atom, Compound, Constant, SYMBOL_RE

_SLOT_RE = re.compile(r"<([A-Za-z][A-Za-z0-9]*)>")
_WORD_RE = re.compile(r"[A-Za-z0-9]+")


class SpeakerRole(enum.Enum):
    CLIENT = "client"
    SERVICE_AGENT = "agent"


def normalize_symbol(phrase: str) -> str:
    """Map a phrase to a dialect identifier: 'ProductX' -> productX."""
    words = _WORD_RE.findall(phrase)
    if not words:
        raise UnmappableToken(f"no identifier in {phrase!r}")
    symbol = "_".join(w[0].lower() + w[1:] for w in words)
    if not SYMBOL_RE.match(symbol):
        raise UnmappableToken(f"{phrase!r} normalizes to invalid symbol {symbol!r}")
    return symbol


@dataclass(frozen=True)
class PatternRule:
    id: str
    template: str
    emission: str
    regex: re.Pattern = field(compare=False, default=None)

    @staticmethod
    def compile(rule_id: str, template: str, emission: str) -> "PatternRule":
        slots = [s.lower() for s in _SLOT_RE.findall(template)]
        pattern_parts = []
        pos = 0
        stripped = template.strip().rstrip(".?!")
        for m in _SLOT_RE.finditer(stripped):
            literal = stripped[pos : m.start()].strip()
            if literal:
                pattern_parts.append(r"\s*" + re.escape(literal).replace(r"\ ", r"\s+") + r"\s*")
            pattern_parts.append(f"(?P<{m.group(1).lower()}>.+?)")
            pos = m.end()
        tail = stripped[pos:].strip()
        if tail:
            pattern_parts.append(r"\s*" + re.escape(tail).replace(r"\ ", r"\s+") + r"\s*")
        regex = re.compile("^" + "".join(pattern_parts) + "$", re.IGNORECASE)
        rule = PatternRule(rule_id, template.strip(), emission.strip(), regex)
        for ref in _emission_symbols(emission):
            if ref not in slots and not SYMBOL_RE.match(ref):
                raise ConfigError(f"pattern {rule_id}: emission slot <{ref}> not in template")
        return rule


def _emission_symbols(emission: str) -> list[str]:
    return re.findall(r"[A-Za-z][A-Za-z0-9_]*", emission)


def _emit_atoms(rule: PatternRule, captures: dict[str, str]) -> list[Atom]:
    """Instantiate the emission schema: slot names are replaced by the
    normalized captured phrases, other identifiers pass through."""

    def symbol(name: str) -> str:
        if name.lower() in captures:
            return normalize_symbol(captures[name.lower()])
        return name

    atoms = []
    for m in re.finditer(r"([A-Za-z][A-Za-z0-9_]*)\s*(\(([^)]*)\))?", rule.emission):
        name, paren, inner = m.group(1), m.group(2), m.group(3)
        if paren is None:
            continue  # bare tokens inside parens are handled via the outer match
        args = []
        for raw in inner.split(","):
            raw = raw.strip()
            if raw:
                args.append(Constant(symbol(raw)))
        atoms.append(Atom(symbol(name), tuple(args)))
    return atoms


@dataclass(frozen=True)
class TranslationResult:
    source_text: str
    facts: tuple
    matched_pattern: str | None

    @property
    def matched(self) -> bool:
        return self.matched_pattern is not None


DEFAULT_PATTERNS = [
    ("T1", "<NP> is <ADJP>", "adjp(np)"),
    ("T2", "what are the features of <NP>?", "question(features, np)"),
    ("T3", "<NP> has <NP2>", "has(np, np2)"),
]


class PatternTable:
    def __init__(self, rules: list[PatternRule]):
        self.rules = list(rules)

    @classmethod
    def default(cls) -> "PatternTable":
        return cls([PatternRule.compile(i, t, e) for i, t, e in DEFAULT_PATTERNS])

    @classmethod
    def load(cls, path: str | Path) -> "PatternTable":
        rules = []
        for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=>" not in line:
                raise ConfigError(f"{path}:{n}: expected 'TEMPLATE => EMISSION'")
            template, emission = line.split("=>", 1)
            rules.append(PatternRule.compile(f"T{len(rules) + 1}", template, emission))
        return cls(rules)


def _reify(atom: Atom):
    if atom.args:
        return Compound(atom.predicate, atom.args)
    return Constant(atom.predicate)


def translate_sentence(
    sentence: str, role: SpeakerRole, table: PatternTable | None = None
) -> TranslationResult:
    table = table or PatternTable.default()
    text = sentence.strip().rstrip(".?!").strip()
    for rule in table.rules:
        m = rule.regex.match(text)
        if not m:
            continue
        try:
            atoms = _emit_atoms(rule, m.groupdict())
        except UnmappableToken:
            continue
        facts = list(atoms)
        if role is SpeakerRole.SERVICE_AGENT:
            facts.extend(Atom("answer", (_reify(a),)) for a in atoms)
        return TranslationResult(sentence, tuple(facts), rule.id)
    return TranslationResult(sentence, (), None)


@dataclass(frozen=True)
class DialogueTurn:
    role: SpeakerRole
    text: str


_SENTENCE_SPLIT_RE = re.compile(r"[^.?!]+[.?!]?")


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_SPLIT_RE.findall(text) if s.strip()]


def translate_turn(
    turn: DialogueTurn, table: PatternTable | None = None
) -> list[TranslationResult]:
    return [translate_sentence(s, turn.role, table) for s in split_sentences(turn.text)]
