"""Recursive-descent parser for the `.lp` dialect.

Grammar: `.`-terminated statements, `:-` rule separator, `not ` body
negation, `%` line comments.  Safety and arity consistency are enforced
at program construction time.
"""

from __future__ import annotations

import re

from ethichat.errors import DepthError, ParseError
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
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<ifsym>:-)
  | (?P<dot>\.)
  | (?P<comma>,)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(line, col, "a valid token")
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(tok.line, tok.col, what)
        self.pos += 1
        return tok

    def parse_program(self) -> Program:
        rules = []
        while self.peek().kind != "eof":
            rules.append(self.parse_rule())
        return Program(tuple(rules))

    def parse_rule(self) -> Rule:
        head = self.parse_atom()
        body = []
        if self.peek().kind == "ifsym":
            self.pos += 1
            body.append(self.parse_literal())
            while self.peek().kind == "comma":
                self.pos += 1
                body.append(self.parse_literal())
        self.expect("dot", "'.'")
        return Rule(head, tuple(body))

    def parse_literal(self) -> Literal:
        tok = self.peek()
        if tok.kind == "name" and tok.text == "not":
            self.pos += 1
            return Literal(self.parse_atom(), negated=True)
        return Literal(self.parse_atom(), negated=False)

    def parse_atom(self) -> Atom:
        tok = self.expect("name", "a predicate symbol")
        if not tok.text[0].islower():
            raise ParseError(tok.line, tok.col, "a lowercase predicate symbol")
        args = ()
        if self.peek().kind == "lpar":
            self.pos += 1
            args = [self.parse_term()]
            while self.peek().kind == "comma":
                self.pos += 1
                args.append(self.parse_term())
            self.expect("rpar", "')'")
        return Atom(tok.text, tuple(args))

    def parse_term(self):
        tok = self.expect("name", "a term")
        if tok.text[0].isupper():
            return Variable(tok.text)
        if self.peek().kind == "lpar":
            self.pos += 1
            args = [self.parse_term()]
            while self.peek().kind == "comma":
                self.pos += 1
                args.append(self.parse_term())
            self.expect("rpar", "')'")
            term = Compound(tok.text, tuple(args))
            if term_depth(term) > MAX_TERM_DEPTH:
                raise DepthError(str(term), MAX_TERM_DEPTH)
            return term
        return Constant(tok.text)


def parse_program(text: str) -> Program:
    return _Parser(text).parse_program()


def parse_rule(text: str) -> Rule:
    parser = _Parser(text)
    rule = parser.parse_rule()
    parser.expect("eof", "end of input")
    rule.check_safety()
    return rule


def parse_atom(text: str) -> Atom:
    parser = _Parser(text)
    atom = parser.parse_atom()
    parser.expect("eof", "end of input")
    return atom
