"""Polynomial expression parser and canonical printer.

Grammar: ``+ - * / ^`` with integer literals, rational literals written as
integer quotients (``1/3``), parentheses, and declared variable names.
Division is only allowed by subexpressions that evaluate to nonzero
constants.  The canonical printer (``Poly.__str__``) emits the same grammar
with terms in descending graded lex order, so parse/print round-trips.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .polynomials import Poly, PolyRing, make_poly


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


_TOKEN_CHARS = set("+-*/^()")


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in _TOKEN_CHARS:
            tokens.append((ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens, ring: PolyRing,
                 bindings: Mapping[str, object] | None):
        self.tokens = tokens
        self.pos = 0
        self.ring = ring
        self.bindings = dict(bindings or {})

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1] or 'end of input'}",
                             tok[2], tok[3])
        self.pos += 1
        return tok

    def parse(self) -> Poly:
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected trailing {tok[1]!r}", tok[2], tok[3])
        return value

    def expr(self) -> Poly:
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Poly:
        value = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, line, col = self.take()
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if not rhs.is_constant():
                    raise ParseError("division only by nonzero constants",
                                     line, col)
                c = rhs.constant_coefficient()
                if c == 0:
                    raise ParseError("division by zero", line, col)
                value = value * (Fraction(1) / Fraction(c))
        return value

    def factor(self) -> Poly:
        tok = self.peek()
        if tok[0] == "-":
            self.take()
            return -self.factor()
        if tok[0] == "+":
            self.take()
            return self.factor()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[0] == "^":
            _, _, line, col = self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            etok = self.take("int")
            if neg:
                raise ParseError("negative exponents are not supported",
                                 line, col)
            return base ** int(etok[1])
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, text, line, col = tok
        if kind == "(":
            value = self.expr()
            self.take(")")
            return value
        if kind == "int":
            return make_poly(self.ring, {0: int(text)} if int(text) else {})
        if kind == "name":
            if text in self.ring._pos:
                return self.ring.variable(text)
            if text in self.bindings:
                c = Fraction(str(self.bindings[text]))
                return make_poly(self.ring, {0: c} if c else {})
            raise ParseError(f"unknown variable {text!r}", line, col)
        raise ParseError(f"unexpected {text!r}" if text else "unexpected end of input",
                         line, col)


def parse_polynomial(text: str, ring: PolyRing,
                     bindings: Mapping[str, object] | None = None) -> Poly:
    """Parse ``text`` into a polynomial of ``ring``.

    ``bindings`` maps parameter names to rational constants; parameter names
    must not shadow ring variables.
    """
    if bindings:
        clash = set(bindings) & set(ring.names)
        if clash:
            raise ValueError(f"parameters shadow variables: {sorted(clash)}")
    return _Parser(_tokenize(text), ring, bindings).parse()
