"""AST for the restricted logic-program dialect: terms, atoms, literals, rules, programs.

Values are immutable and hashable; canonical rendering doubles as the
deterministic sort key used everywhere downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from ethichat.errors import ArityError, DepthError, SafetyError

VARIABLE_RE = re.compile(r"[A-Z][A-Za-z0-9_]*$")
SYMBOL_RE = re.compile(r"[a-z][A-Za-z0-9_]*$")

MAX_TERM_DEPTH = 2


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not VARIABLE_RE.match(self.name):
            raise ValueError(f"bad variable name {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Constant:
    symbol: str

    def __post_init__(self):
        if not SYMBOL_RE.match(self.symbol):
            raise ValueError(f"bad constant symbol {self.symbol!r}")

    def __str__(self):
        return self.symbol


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        if not SYMBOL_RE.match(self.functor):
            raise ValueError(f"bad functor {self.functor!r}")
        if not self.args:
            raise ValueError("compound term needs at least one argument")
        object.__setattr__(self, "args", tuple(self.args))
        if term_depth(self) > MAX_TERM_DEPTH:
            raise DepthError(str(self), MAX_TERM_DEPTH)

    def __str__(self):
        return f"{self.functor}({', '.join(str(a) for a in self.args)})"


Term = Variable | Constant | Compound


def term_depth(t: Term) -> int:
    if isinstance(t, Compound):
        return 1 + max(term_depth(a) for a in t.args)
    return 1


def term_is_ground(t: Term) -> bool:
    if isinstance(t, Variable):
        return False
    if isinstance(t, Compound):
        return all(term_is_ground(a) for a in t.args)
    return True


def term_variables(t: Term) -> set[str]:
    if isinstance(t, Variable):
        return {t.name}
    if isinstance(t, Compound):
        out: set[str] = set()
        for a in t.args:
            out |= term_variables(a)
        return out
    return set()


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()

    def __post_init__(self):
        if not SYMBOL_RE.match(self.predicate):
            raise ValueError(f"bad predicate symbol {self.predicate!r}")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(term_is_ground(a) for a in self.args)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.args:
            out |= term_variables(a)
        return out

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(str(a) for a in self.args)})"

    def __lt__(self, other: "Atom"):
        return str(self) < str(other)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self):
        return f"not {self.atom}" if self.negated else str(self.atom)

    def __lt__(self, other: "Literal"):
        return str(self) < str(other)


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))

    def is_fact(self) -> bool:
        return not self.body

    def is_ground(self) -> bool:
        return self.head.is_ground() and all(l.atom.is_ground() for l in self.body)

    def positive_body(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.body if not l.negated)

    def negative_body(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.body if l.negated)

    def variables(self) -> set[str]:
        out = self.head.variables()
        for l in self.body:
            out |= l.atom.variables()
        return out

    def check_safety(self, index: int = 0) -> None:
        bound: set[str] = set()
        for a in self.positive_body():
            bound |= a.variables()
        unsafe = self.head.variables() - bound
        for a in self.negative_body():
            unsafe |= a.variables() - bound
        if unsafe:
            raise SafetyError(index, min(unsafe))

    def __str__(self):
        if self.is_fact():
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(l) for l in self.body)}."


@dataclass(frozen=True)
class Program:
    rules: tuple = ()
    signature: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        sig: dict[str, int] = {}
        for i, r in enumerate(self.rules):
            r.check_safety(i)
            for atom in (r.head, *[l.atom for l in r.body]):
                seen = sig.get(atom.predicate)
                if seen is None:
                    sig[atom.predicate] = atom.arity
                elif seen != atom.arity:
                    raise ArityError(atom.predicate, {seen, atom.arity})
        object.__setattr__(self, "signature", sig)

    def facts(self) -> tuple[Atom, ...]:
        return tuple(r.head for r in self.rules if r.is_fact())

    def is_ground(self) -> bool:
        return all(r.is_ground() for r in self.rules)

    def __add__(self, other: "Program") -> "Program":
        return Program(self.rules + other.rules)

    def __len__(self):
        return len(self.rules)


def program_from_rules(rules: Iterable[Rule]) -> Program:
    return Program(tuple(rules))


def print_program(p: Program) -> str:
    return "\n".join(str(r) for r in p.rules)
