"""Shared fixtures, program generators, and the brute-force solver oracle.

The oracle enumerates every subset of the Herbrand base and checks the
stability fixpoint with its own reduct and least-model code, independent
of the implementation under test.
"""

from __future__ import annotations

import random
from itertools import chain, combinations

import pytest

from ethichat.asp.syntax import Atom, Literal, Program, Rule
from ethichat.asp.parser import parse_program

SCENARIO_KB = """\
sensitiveSlogan(environmentally_friendly(productX)).
"""

SCENARIO_RULE = (
    "unethical(V1) :- sensitiveSlogan(V1), not relevant(V1), answer(V1)."
)

SCENARIO_CASE = """\
environmentally_friendly(productX).
answer(environmentally_friendly(productX)).
"""

E_TERM = "environmentally_friendly(productX)"


@pytest.fixture
def scenario_program():
    return parse_program(SCENARIO_KB + SCENARIO_RULE + "\n" + SCENARIO_CASE)


# -- brute-force oracle -----------------------------------------------------


def oracle_herbrand_base(rules):
    base = set()
    for head, pos, neg in rules:
        base.add(head)
        base.update(pos)
        base.update(neg)
    return base


def oracle_least_model(positive_rules):
    model = set()
    changed = True
    while changed:
        changed = False
        for head, pos in positive_rules:
            if head not in model and all(p in model for p in pos):
                model.add(head)
                changed = True
    return model


def oracle_stable_models(rules):
    """rules: list of (head, pos_tuple, neg_tuple) over hashable atoms."""
    base = sorted(oracle_herbrand_base(rules), key=str)
    models = []
    for bits in chain.from_iterable(combinations(base, k) for k in range(len(base) + 1)):
        candidate = set(bits)
        reduct = [
            (head, pos)
            for head, pos, neg in rules
            if not any(n in candidate for n in neg)
        ]
        if oracle_least_model(reduct) == candidate:
            models.append(frozenset(candidate))
    return set(models)


def rules_as_triples(program: Program):
    return [
        (rule.head, rule.positive_body(), rule.negative_body())
        for rule in program.rules
    ]


# -- random program generators ----------------------------------------------


def random_ground_program(
    rng: random.Random,
    max_atoms: int = 8,
    max_rules: int = 12,
    max_neg: int = 3,
) -> Program:
    n_atoms = rng.randint(1, max_atoms)
    atoms = [Atom(f"p{i}") for i in range(n_atoms)]
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(atoms)
        n_pos = rng.randint(0, min(3, n_atoms))
        n_neg = rng.randint(0, max_neg)
        pos = rng.sample(atoms, n_pos)
        neg = rng.sample(atoms, min(n_neg, n_atoms))
        body = tuple(
            [Literal(a) for a in pos] + [Literal(a, negated=True) for a in neg]
        )
        rules.append(Rule(head, body))
    return Program(tuple(rules))


def random_positive_program(rng: random.Random, max_atoms: int = 8, max_rules: int = 10) -> Program:
    n_atoms = rng.randint(1, max_atoms)
    atoms = [Atom(f"p{i}") for i in range(n_atoms)]
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(atoms)
        pos = rng.sample(atoms, rng.randint(0, min(3, n_atoms)))
        rules.append(Rule(head, tuple(Literal(a) for a in pos)))
    return Program(tuple(rules))


def random_stratified_program(rng: random.Random, max_atoms: int = 8, max_rules: int = 10) -> Program:
    """Negation only points at strictly lower strata: no recursion through not."""
    n_atoms = rng.randint(2, max_atoms)
    atoms = [Atom(f"p{i}") for i in range(n_atoms)]
    stratum = {a: rng.randint(0, 2) for a in atoms}
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        head = rng.choice(atoms)
        same_or_lower = [a for a in atoms if stratum[a] <= stratum[head]]
        lower = [a for a in atoms if stratum[a] < stratum[head]]
        pos = rng.sample(same_or_lower, rng.randint(0, min(2, len(same_or_lower))))
        neg = rng.sample(lower, rng.randint(0, min(2, len(lower)))) if lower else []
        body = tuple(
            [Literal(a) for a in pos] + [Literal(a, negated=True) for a in neg]
        )
        rules.append(Rule(head, body))
    return Program(tuple(rules))
