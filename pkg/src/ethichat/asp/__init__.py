from ethichat.asp.syntax import (
    Atom,
    Compound,
    Constant,
    Literal,
    Program,
    Rule,
    Variable,
    print_program,
)
from ethichat.asp.parser import parse_atom, parse_program, parse_rule
from ethichat.asp.ground import ground_program, herbrand_universe
from ethichat.asp.solve import AnswerSet, least_model, reduct, stable_models
from ethichat.asp.explain import (
    Justification,
    JustificationStep,
    Verdict,
    extract_verdict,
    justify,
    unknown,
)

__all__ = [
    "Atom",
    "Compound",
    "Constant",
    "Literal",
    "Program",
    "Rule",
    "Variable",
    "print_program",
    "parse_atom",
    "parse_program",
    "parse_rule",
    "ground_program",
    "herbrand_universe",
    "AnswerSet",
    "least_model",
    "reduct",
    "stable_models",
    "Justification",
    "JustificationStep",
    "Verdict",
    "extract_verdict",
    "justify",
    "unknown",
]
