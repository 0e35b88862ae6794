"""Stable-model solver for ground normal programs.

Guess-and-check over the atoms appearing under negation: a partial
in/out assignment is propagated through reduct + least-model bounds and
pruned on contradiction; full assignments are verified for stability.
"""

from __future__ import annotations

from dataclasses import dataclass

from ethichat.errors import CapacityError
from ethichat.asp.syntax import Atom, Literal, Program, Rule

DEFAULT_SEARCH_LIMIT = 1_000_000


@dataclass(frozen=True)
class AnswerSet:
    atoms: frozenset

    def __post_init__(self):
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        for a in self.atoms:
            if not a.is_ground():
                raise ValueError(f"non-ground atom {a} in answer set")

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def __iter__(self):
        return iter(sorted(self.atoms, key=str))

    def __len__(self):
        return len(self.atoms)

    def render(self) -> str:
        return "{" + ", ".join(str(a) for a in self) + "}"


def reduct(g: Program, s: AnswerSet | frozenset) -> Program:
    """Gelfond-Lifschitz transform: drop rules blocked by s, strip negation."""
    atoms = s.atoms if isinstance(s, AnswerSet) else frozenset(s)
    out = []
    for rule in g.rules:
        if any(n in atoms for n in rule.negative_body()):
            continue
        out.append(Rule(rule.head, tuple(Literal(a) for a in rule.positive_body())))
    return Program(tuple(out))


def least_model(g: Program) -> AnswerSet:
    """Immediate-consequence fixpoint of a positive ground program."""
    derived: set[Atom] = set()
    rules = [(r.head, set(r.positive_body())) for r in g.rules]
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if head not in derived and body <= derived:
                derived.add(head)
                changed = True
    return AnswerSet(frozenset(derived))


def _consequences(g: Program, inset: set, outset: set, default_in: bool) -> set:
    """Least model treating unassigned negated atoms as in (default_in) or out."""
    derived: set[Atom] = set()
    active = []
    for rule in g.rules:
        blocked = False
        for n in rule.negative_body():
            if n in inset or (default_in and n not in outset):
                blocked = True
                break
        if not blocked:
            active.append((rule.head, set(rule.positive_body())))
    changed = True
    while changed:
        changed = False
        for head, body in active:
            if head not in derived and body <= derived:
                derived.add(head)
                changed = True
    return derived


def stable_models(g: Program, search_limit: int = DEFAULT_SEARCH_LIMIT) -> list[AnswerSet]:
    neg_atoms = sorted({a for r in g.rules for a in r.negative_body()}, key=str)
    models: dict[frozenset, AnswerSet] = {}
    steps = 0

    def search(idx: int, inset: set, outset: set):
        nonlocal steps
        steps += 1
        if steps > search_limit:
            raise CapacityError(f"stable-model search exceeds {search_limit} steps")
        lower = _consequences(g, inset, outset, default_in=True)
        upper = _consequences(g, inset, outset, default_in=False)
        if any(a not in upper for a in inset) or any(a in lower for a in outset):
            return
        if idx == len(neg_atoms):
            model = _consequences(g, inset, outset, default_in=False)
            if {a for a in neg_atoms if a in model} == inset:
                models[frozenset(model)] = AnswerSet(frozenset(model))
            return
        atom = neg_atoms[idx]
        search(idx + 1, inset, outset | {atom})
        search(idx + 1, inset | {atom}, outset)

    search(0, set(), set())
    return sorted(models.values(), key=lambda m: m.render())
