"""Grounding: instantiate rule variables over the program's Herbrand universe.

The universe is every constant and ground compound occurring in the
program, capped at the dialect's term depth, so function symbols cannot
blow it up.
"""

from __future__ import annotations

from itertools import product

from ethichat.errors import CapacityError
from ethichat.asp.syntax import (
    MAX_TERM_DEPTH,
    Atom,
    Compound,
    Constant,
    Literal,
    Program,
    Rule,
    Variable,
    term_depth,
    term_is_ground,
)

DEFAULT_MAX_GROUND_ATOMS = 100_000


def herbrand_universe(p: Program) -> list:
    """All ground subterms occurring in p, sorted canonically."""
    seen = {}

    def visit(term):
        if isinstance(term, Variable):
            return
        if term_is_ground(term):
            seen[str(term)] = term
        if isinstance(term, Compound):
            for a in term.args:
                visit(a)

    for rule in p.rules:
        for atom in (rule.head, *[l.atom for l in rule.body]):
            for arg in atom.args:
                visit(arg)
    return [seen[k] for k in sorted(seen)]


def _subst_term(term, binding):
    if isinstance(term, Variable):
        return binding[term.name]
    if isinstance(term, Compound):
        args = tuple(_subst_term(a, binding) for a in term.args)
        if 1 + max(term_depth(a) for a in args) > MAX_TERM_DEPTH:
            return None
        return Compound(term.functor, args)
    return term


def _subst_atom(atom: Atom, binding):
    args = []
    for a in atom.args:
        g = _subst_term(a, binding)
        if g is None:
            return None
        args.append(g)
    return Atom(atom.predicate, tuple(args))


def instantiate(rule: Rule, binding: dict) -> Rule | None:
    """Ground instance of rule under binding, or None if the depth cap is hit."""
    head = _subst_atom(rule.head, binding)
    if head is None:
        return None
    body = []
    for lit in rule.body:
        atom = _subst_atom(lit.atom, binding)
        if atom is None:
            return None
        body.append(Literal(atom, lit.negated))
    return Rule(head, tuple(body))


def ground_program(p: Program, max_ground_atoms: int = DEFAULT_MAX_GROUND_ATOMS) -> Program:
    universe = herbrand_universe(p)
    ground_rules = []
    seen_rules = set()
    atoms = set()
    for rule in p.rules:
        variables = sorted(rule.variables())
        if not variables:
            if str(rule) not in seen_rules:
                seen_rules.add(str(rule))
                ground_rules.append(rule)
                atoms.add(str(rule.head))
                atoms.update(str(lit.atom) for lit in rule.body)
            continue
        for combo in product(universe, repeat=len(variables)):
            binding = dict(zip(variables, combo))
            inst = instantiate(rule, binding)
            if inst is None:
                continue
            key = str(inst)
            if key in seen_rules:
                continue
            seen_rules.add(key)
            ground_rules.append(inst)
            atoms.add(str(inst.head))
            for lit in inst.body:
                atoms.add(str(lit.atom))
            if len(atoms) > max_ground_atoms:
                raise CapacityError(
                    f"grounding exceeds {max_ground_atoms} ground atoms"
                )
    return Program(tuple(ground_rules))
