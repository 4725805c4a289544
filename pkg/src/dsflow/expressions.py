"""Tiny arithmetic expression language for initial-profile specs.

Supported: float/int literals, the variables handed in by the caller
(theta and, on 2-D grids, phi), the constant pi, unary minus, + - * /,
parentheses, and the single-argument functions sin, cos, exp, cosh, sinh.
No user-defined names, no power operator.
"""

from __future__ import annotations

import re

import numpy as np

_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp,
          "cosh": np.cosh, "sinh": np.sinh}
_CONSTS = {"pi": np.pi}

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"
                    r"|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class ExpressionError(ValueError):
    """Syntax or name error in a profile expression."""


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionError(f"bad character at position {pos}: {text[pos:]!r}")
        num, name, sym = m.groups()
        if num is not None:
            tokens.append(("num", float(text[m.start():m.end()].strip())))
        elif name is not None:
            tokens.append(("name", name))
        elif sym.strip():
            if sym not in "+-*/()":
                raise ExpressionError(f"unexpected character {sym!r}")
            tokens.append(("op", sym))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, sym):
        kind, val = self.next()
        if kind != "op" or val != sym:
            raise ExpressionError(f"expected {sym!r}, got {val!r}")

    def expr(self):
        value = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.next()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.next()
            rhs = self.unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary(self):
        if self.peek() == ("op", "-"):
            self.next()
            return -self.unary()
        return self.atom()

    def atom(self):
        kind, val = self.next()
        if kind == "num":
            return val
        if kind == "name":
            if val in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return _FUNCS[val](arg)
            if val in _CONSTS:
                return _CONSTS[val]
            if val in self.variables:
                return self.variables[val]
            raise ExpressionError(f"unknown name {val!r}")
        if (kind, val) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExpressionError(f"unexpected token {val!r}")


def evaluate(text: str, variables: dict) -> np.ndarray:
    """Evaluate an expression over numpy-array variables (broadcasting)."""
    parser = _Parser(_tokenize(text), variables)
    value = parser.expr()
    if parser.peek()[0] != "end":
        raise ExpressionError(f"trailing input: {parser.peek()[1]!r}")
    return value
