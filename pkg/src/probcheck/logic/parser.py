"""Recursive-descent parser for the ASCII formula syntax.

Grammar (whitespace-insensitive)::

    state := "true" | IDENT | "!" state | "(" state "&" state ")"
           | "P" CMP PROB "[" path "]"
    path  := "X" state | state "U" state | "(" path ")" | "!" path
           | "(" path "&" path ")" | "X" path | path "U" path
    CMP   := ">" | ">="
    PROB  := INT "/" INT | INT | DECIMAL

``X``, ``U`` and ``true`` are reserved; ``P`` is the probability operator
only when a comparison follows it. Unary operators bind tighter than ``U``,
which associates to the right.

Parsing is two-phase: one sort-agnostic pass builds a raw tree, then the
tree is sorted into state and path formulas. This avoids backtracking over
the ``(`` that both sorts share.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from ..errors import ParseError
from .syntax import (
    TRUE,
    And,
    Atom,
    Not,
    PathFormula,
    ProbOp,
    StateFormula,
    as_path,
    path_and,
    path_next,
    path_not,
    path_until,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>>=|>|/|\(|\)|\[|\]|!|&)
    """,
    re.VERBOSE,
)

KEYWORDS = {"true", "X", "U"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ws":
            for i, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            if kind == "ident" and chunk in KEYWORDS:
                kind = chunk
            elif kind == "op":
                kind = chunk
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass
class _Raw:
    tag: str
    token: Token
    args: tuple = ()


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail(f"expected {kind!r}")
        return self.advance()

    def fail(self, message, token: Optional[Token] = None):
        token = token or self.tok
        found = "end of input" if token.kind == "eof" else repr(token.text)
        raise ParseError(f"{message}, found {found}", token.line, token.column)

    def expr(self) -> _Raw:
        left = self.unary()
        if self.tok.kind == "U":
            op = self.advance()
            return _Raw("until", op, (left, self.expr()))
        return left

    def unary(self) -> _Raw:
        t = self.tok
        if t.kind == "!":
            self.advance()
            return _Raw("not", t, (self.unary(),))
        if t.kind == "X":
            self.advance()
            return _Raw("next", t, (self.unary(),))
        if t.kind == "(":
            self.advance()
            inner = self.expr()
            if self.tok.kind == "&":
                self.advance()
                right = self.expr()
                self.expect(")")
                return _Raw("and", t, (inner, right))
            self.expect(")")
            return _Raw("group", t, (inner,))
        if t.kind == "true":
            self.advance()
            return _Raw("true", t)
        if t.kind == "ident":
            if t.text == "P" and self.peek().kind in (">", ">="):
                return self.prob_op()
            self.advance()
            return _Raw("atom", t)
        self.fail("expected a formula")

    def prob_op(self) -> _Raw:
        start = self.advance()
        cmp = self.advance().kind
        bound_tok = self.tok
        bound = self.number()
        if bound > 1:
            raise ParseError(f"probability bound {bound} exceeds 1", bound_tok.line, bound_tok.column)
        self.expect("[")
        body = self.expr()
        self.expect("]")
        return _Raw("prob", start, (cmp, bound, body))

    def number(self) -> Fraction:
        t = self.expect("num") if self.tok.kind == "num" else self.fail("expected a probability")
        value = Fraction(t.text)
        if self.tok.kind == "/":
            self.advance()
            den_tok = self.tok
            if "." in t.text:
                self.fail("a fraction needs an integer numerator", t)
            den = self.expect("num")
            if "." in den.text or int(den.text) == 0:
                self.fail("a fraction needs a positive integer denominator", den_tok)
            value = Fraction(int(t.text), int(den.text))
        return value


def _state(node: _Raw) -> StateFormula:
    tag = node.tag
    if tag == "true":
        return TRUE
    if tag == "atom":
        return Atom(node.token.text)
    if tag == "not":
        return Not(_state(node.args[0]))
    if tag == "and":
        return And(_state(node.args[0]), _state(node.args[1]))
    if tag == "prob":
        cmp, bound, body = node.args
        return ProbOp(cmp, bound, _path(body))
    what = {"until": "'U'", "next": "'X'", "group": "parenthesized path"}[tag]
    raise ParseError(
        f"{what} is a path operator and cannot stand where a state formula is expected "
        "(wrap it in P>r [ ... ])",
        node.token.line,
        node.token.column,
    )


def _path(node: _Raw) -> PathFormula:
    tag = node.tag
    if tag == "until":
        return path_until(_path(node.args[0]), _path(node.args[1]))
    if tag == "next":
        return path_next(_path(node.args[0]))
    if tag == "group":
        return _path(node.args[0])
    if tag == "not":
        return path_not(_path(node.args[0]))
    if tag == "and":
        return path_and(_path(node.args[0]), _path(node.args[1]))
    return as_path(_state(node))


def _parse(text: str) -> _Raw:
    p = _Parser(text)
    node = p.expr()
    if p.tok.kind != "eof":
        if p.tok.kind == "&":
            p.fail("'&' must be inside parentheses")
        p.fail("unexpected trailing input")
    return node


def parse_formula(text: str) -> StateFormula:
    """Parse a state formula."""
    return _state(_parse(text))


def parse_path_formula(text: str) -> PathFormula:
    return _path(_parse(text))
