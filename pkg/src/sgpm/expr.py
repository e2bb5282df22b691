"""A small arithmetic language for problem data.

Grammar, loosest binding first::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" unary)?
    primary := NUMBER | "x" | "t" | FUNC "(" expr ")" | "(" expr ")"

``^`` is right-associative and binds tighter than unary minus, so ``-x^2`` is
``-(x^2)`` and ``2^-1`` is ``0.5``.  FUNC is one of sin, cos, sinh, cosh, exp.
Parsed expressions compile to closures over numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

FUNCTIONS: dict[str, Callable] = {
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "exp": np.exp,
}
VARIABLES = ("x", "t")

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


class ExpressionError(ValueError):
    """Syntax or name error; ``offset`` counts bytes of the UTF-8 source."""

    def __init__(self, message: str, source: str, index: int):
        self.offset = len(source[:index].encode("utf-8"))
        self.source = source
        self.reason = message
        super().__init__(f"{message} at byte {self.offset}")


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    index: int


def tokenize(src: str) -> list[_Token]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {src[pos]!r}", src, pos)
        if m.lastgroup != "space":
            out.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(_Token("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = tokenize(src)
        self.pos = 0
        self.names: set[str] = set()

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise ExpressionError(message, self.src, tok.index)

    def expect(self, text: str):
        tok = self.peek()
        if tok.text != text:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            self.fail(f"expected {text!r}, found {found}")
        return self.take()

    def parse(self):
        if self.peek().kind == "end":
            self.fail("empty expression")
        node = self.expr()
        if self.peek().kind != "end":
            self.fail(f"unexpected {self.peek().text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            node = _add(node, rhs) if op == "+" else _sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            rhs = self.unary()
            node = _mul(node, rhs) if op == "*" else _div(node, rhs)
        return node

    def unary(self):
        if self.peek().text == "-":
            self.take()
            return _neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek().text == "^":
            self.take()
            return _pow(base, self.unary())
        return base

    def primary(self):
        tok = self.peek()
        if tok.kind == "number":
            self.take()
            value = float(tok.text)
            return lambda x, t: value
        if tok.kind == "name":
            self.take()
            if tok.text in VARIABLES:
                self.names.add(tok.text)
                return (lambda x, t: x) if tok.text == "x" else (lambda x, t: t)
            if tok.text in FUNCTIONS:
                return self.call(tok)
            self.fail(f"unknown identifier {tok.text!r}", tok)
        if tok.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        self.fail(f"expected a value, found {found}")

    def call(self, name: _Token):
        fn = FUNCTIONS[name.text]
        if self.peek().text != "(":
            self.fail(f"function {name.text} needs parentheses")
        self.take()
        if self.peek().text == ")":
            self.fail(f"{name.text} takes 1 argument, got 0")
        arg = self.expr()
        count = 1
        while self.peek().text == ",":
            self.take()
            self.expr()
            count += 1
        if count != 1:
            self.fail(f"{name.text} takes 1 argument, got {count}", name)
        self.expect(")")
        return lambda x, t: fn(arg(x, t))


def _add(a, b):
    return lambda x, t: a(x, t) + b(x, t)


def _sub(a, b):
    return lambda x, t: a(x, t) - b(x, t)


def _mul(a, b):
    return lambda x, t: a(x, t) * b(x, t)


def _div(a, b):
    return lambda x, t: np.divide(a(x, t), b(x, t))


def _neg(a):
    return lambda x, t: -a(x, t)


def _pow(a, b):
    return lambda x, t: np.power(np.asarray(a(x, t), dtype=float), b(x, t))


@dataclass(frozen=True)
class Expression:
    """Compiled expression.  Call with arrays ``x`` and ``t``; the result broadcasts."""

    source: str
    variables: frozenset
    _fn: Callable

    def __call__(self, x=0.0, t=0.0):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        out = np.asarray(self._fn(x, t), dtype=float)
        return np.broadcast_to(out, np.broadcast_shapes(x.shape, t.shape, out.shape)).copy()

    def of_x(self) -> Callable:
        """Function of ``x`` alone; fails if the source mentions ``t``."""
        self._only("x")
        return lambda x: self(x, 0.0)

    def of_t(self) -> Callable:
        self._only("t")
        return lambda t: self(0.0, t)

    def constant(self) -> float:
        self._only()
        return float(self())

    def _only(self, *allowed: str):
        extra = sorted(self.variables - set(allowed))
        if extra:
            where = self.source.find(extra[0])
            raise ExpressionError(f"variable {extra[0]!r} is not allowed here", self.source, max(where, 0))


def parse_expression(src: str) -> Expression:
    """Compile ``src`` into an :class:`Expression`.

    >>> float(parse_expression("x^2 + t")(0.5, 0.2))
    0.45
    """
    if not isinstance(src, str):
        raise TypeError("expression source must be a string")
    parser = _Parser(src)
    fn = parser.parse()
    return Expression(src, frozenset(parser.names), fn)
