"""Tiny recursive-descent parser for scalar maps of one variable ``x``.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "x" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := cos | sin | exp | log | sqrt

``^`` binds tighter than unary minus and is right-associative, so
``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``. ``**`` is accepted as an
alias of ``^``.
"""

from __future__ import annotations

import math
import operator
import re
from typing import Callable

__all__ = ["ExpressionError", "parse_expression"]

FUNCTIONS: dict[str, Callable[[float], float]] = {
    "cos": math.cos,
    "sin": math.sin,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
BINARY = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv,
          "^": operator.pow}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>\*\*|[-+*/^()])
""", re.VERBOSE)


class ExpressionError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExpressionError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "op" and value == "**":
                value = "^"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def accept(self, *values: str) -> str | None:
        kind, value, _ = self.tok
        if kind == "op" and value in values:
            self.i += 1
            return value
        return None

    def expect(self, value: str):
        if not self.accept(value):
            raise ExpressionError(f"expected {value!r}", self.tok[2])

    def parse(self):
        node = self.expr()
        if self.tok[0] != "end":
            raise ExpressionError(f"unexpected {self.tok[1]!r}", self.tok[2])
        return node

    def expr(self):
        node = self.term()
        while (op := self.accept("+", "-")):
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while (op := self.accept("*", "/")):
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        if (op := self.accept("+", "-")):
            operand = self.unary()
            return ("neg", operand) if op == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return ("bin", "^", base, self.unary())
        return base

    def atom(self):
        kind, value, pos = self.tok
        if kind == "num":
            self.i += 1
            return ("num", float(value))
        if kind == "name":
            self.i += 1
            if value == "x":
                return ("var",)
            if value in CONSTANTS:
                return ("num", CONSTANTS[value])
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", value, arg)
            raise ExpressionError(f"unknown name {value!r}", pos)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionError("expected a number, x, a function or '('"
                              if kind != "end" else "unexpected end of expression", pos)


def _compile(node) -> Callable[[float], float]:
    tag = node[0]
    if tag == "num":
        c = node[1]
        return lambda x: c
    if tag == "var":
        return lambda x: x
    if tag == "neg":
        f = _compile(node[1])
        return lambda x: -f(x)
    if tag == "call":
        fn, arg = FUNCTIONS[node[1]], _compile(node[2])
        return lambda x: fn(arg(x))
    op, lhs, rhs = BINARY[node[1]], _compile(node[2]), _compile(node[3])
    return lambda x: op(lhs(x), rhs(x))


def parse_expression(text: str) -> Callable[[float], float]:
    """Compile ``text`` into a function of ``x``.

    Domain errors (``log(-1)``, division by zero, overflow) surface when the
    function is called, as ``ValueError``, ``ZeroDivisionError`` or
    ``OverflowError``.

    >>> parse_expression("(x + 2/x)/2")(1.0)
    1.5
    """
    return _compile(_Parser(text).parse())
