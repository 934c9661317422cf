"""Text form of normal-ordered elements: a recursive-descent parser and a canonical printer.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*          division by scalars only
    unary   := ('-' | '+') unary | power
    power   := atom ('^' INT)?
    atom    := INT | INT 'i' | 'i' | 'Z' | q<k> | p<k>
             | '(' expr ')' | '[' expr ',' expr ']' | '{' expr ',' expr '}'

``[X, Y]`` is the commutator XY - YX and ``{X, Y}`` the Lie bracket.
"""
from __future__ import annotations

import re

from .algebra import LambdaElement, LambdaError, commutator, lie_bracket, multiply
from .scalars import GaussianRational, format_scalar

_TOKEN = re.compile(r"\s*(?:(\d+i)|(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class LambdaSyntaxError(LambdaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(0).strip() == "":
            pos = m.end()
            continue
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("IMAG", int(m.group(1)[:-1]), start))
        elif m.group(2):
            tokens.append(("INT", int(m.group(2)), start))
        elif m.group(3):
            tokens.append(("NAME", m.group(3), start))
        else:
            tokens.append(("OP", m.group(4), start))
        pos = m.end()
    tokens.append(("END", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, s: int):
        self.tokens = _tokenize(text)
        self.i = 0
        self.s = s

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        tok = self.take()
        if tok[0] != "OP" or tok[1] != op:
            raise LambdaSyntaxError(f"expected {op!r}", tok[2])
        return tok

    def is_op(self, *ops) -> bool:
        tok = self.peek()
        return tok[0] == "OP" and tok[1] in ops

    def parse(self) -> LambdaElement:
        out = self.expr()
        tok = self.peek()
        if tok[0] != "END":
            raise LambdaSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return out

    def expr(self) -> LambdaElement:
        out = self.term()
        while self.is_op("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> LambdaElement:
        out = self.unary()
        while self.is_op("*", "/"):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                out = multiply(out, rhs)
            else:
                c = rhs.constant()
                if c is None:
                    raise LambdaSyntaxError("division by a non-scalar", pos)
                if c.is_zero():
                    raise LambdaSyntaxError("division by zero", pos)
                out = out.scale(GaussianRational(1) / c)
        return out

    def unary(self) -> LambdaElement:
        if self.is_op("-"):
            self.take()
            return -self.unary()
        if self.is_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> LambdaElement:
        base = self.atom()
        if self.is_op("^"):
            self.take()
            tok = self.take()
            if tok[0] != "INT":
                raise LambdaSyntaxError("expected a non-negative integer exponent", tok[2])
            return base**tok[1]
        return base

    def atom(self) -> LambdaElement:
        kind, val, pos = self.take()
        s = self.s
        if kind == "INT":
            return LambdaElement.scalar(val, s)
        if kind == "IMAG":
            return LambdaElement.scalar(GaussianRational(0, val), s)
        if kind == "NAME":
            return self.symbol(val, pos)
        if kind == "OP" and val == "(":
            out = self.expr()
            self.expect(")")
            return out
        if kind == "OP" and val in "[{":
            x = self.expr()
            self.expect(",")
            y = self.expr()
            self.expect("]" if val == "[" else "}")
            return commutator(x, y) if val == "[" else lie_bracket(x, y)
        if kind == "END":
            raise LambdaSyntaxError("unexpected end of input", pos)
        raise LambdaSyntaxError(f"unexpected {val!r}", pos)

    def symbol(self, name: str, pos: int) -> LambdaElement:
        s = self.s
        if name == "Z":
            return LambdaElement.z(s)
        if name == "i":
            return LambdaElement.scalar(GaussianRational(0, 1), s)
        m = re.fullmatch(r"([qp])([1-9]\d*)", name)
        if m is None:
            raise LambdaSyntaxError(f"unknown symbol {name!r}", pos)
        k = int(m.group(2))
        if k > s:
            raise LambdaSyntaxError(f"index {k} out of range 1..{s} in {name!r}", pos)
        return LambdaElement.q(k, s) if m.group(1) == "q" else LambdaElement.p(k, s)


def parse(text: str, s: int) -> LambdaElement:
    """Parse ``text`` into a normal-ordered element with ``s`` coordinate pairs."""
    if s < 1:
        raise LambdaError("need at least one coordinate pair")
    return _Parser(text, s).parse()


def _monomial_text(m) -> str:
    k, a, b = m
    parts = []
    if k:
        parts.append("Z" if k == 1 else f"Z^{k}")
    for name, expo in (("q", a), ("p", b)):
        for i, e in enumerate(expo):
            if e:
                parts.append(f"{name}{i + 1}" if e == 1 else f"{name}{i + 1}^{e}")
    return "*".join(parts)


def format_element(x: LambdaElement) -> str:
    """Canonical text: terms by descending (Z power, q exponents, p exponents)."""
    if x.is_zero():
        return "0"
    pieces = []
    for idx, (m, c) in enumerate(x.sorted_terms()):
        mono = _monomial_text(m)
        negative = c.is_real() and c.re < 0
        mag = -c if negative else c
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{format_scalar(mag)}*{mono}"
        else:
            body = format_scalar(mag)
        if idx == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)
