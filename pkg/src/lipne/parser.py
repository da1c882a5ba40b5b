"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER | "i" | IDENTIFIER | "(" expr ")"

``i`` is the imaginary unit.  Division is only allowed by nonzero
constants, so ``3/4*x`` and ``x/(2+i)`` are fine while ``x/y`` is not.
Juxtaposition (``2x``, ``x y``) is a syntax error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ParseError, StructuralError
from .poly import I_UNIT, ONE, Polynomial

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")
_ATOM_START = ("integer", "identifier", "'i'", "'('")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "op", "eof"
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(Token("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(Token("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3),
                                 ("operator", *_ATOM_START))
            tokens.append(Token("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], variables: tuple[str, ...]):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect_op(self, ch: str) -> Token:
        t = self.tok
        if t.kind != "op" or t.text != ch:
            raise ParseError(f"unexpected {_describe(t)}", t.offset, (repr(ch),))
        return self.advance()

    def parse(self) -> Polynomial:
        result = self.expr()
        t = self.tok
        if t.kind != "eof":
            expected = ("'+'", "'-'", "'*'", "'/'", "'^'", "end of input")
            if t.kind in ("int", "ident") or (t.kind == "op" and t.text == "("):
                raise ParseError("implicit multiplication is not allowed", t.offset, expected)
            raise ParseError(f"unexpected {_describe(t)}", t.offset, expected)
        return result

    def expr(self) -> Polynomial:
        value = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Polynomial:
        value = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            at = self.tok.offset
            rhs = self.unary()
            if op.text == "*":
                value = value * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero:
                    raise ParseError("division only by nonzero constants", at)
                value = value.scale(ONE / rhs.constant_coefficient())
        return value

    def unary(self) -> Polynomial:
        t = self.tok
        if t.kind == "op" and t.text in "+-":
            self.advance()
            value = self.unary()
            return -value if t.text == "-" else value
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            t = self.tok
            if t.kind != "int":
                raise ParseError(f"unexpected {_describe(t)}", t.offset, ("non-negative integer",))
            self.advance()
            return base ** int(t.text)
        return base

    def atom(self) -> Polynomial:
        t = self.tok
        if t.kind == "int":
            self.advance()
            return Polynomial.constant(int(t.text), self.variables)
        if t.kind == "ident":
            self.advance()
            if t.text == "i":
                return Polynomial.constant(I_UNIT, self.variables)
            if t.text not in self.variables:
                raise ParseError(f"unknown variable {t.text!r}", t.offset, self.variables)
            return Polynomial.variable(t.text, self.variables)
        if t.kind == "op" and t.text == "(":
            self.advance()
            value = self.expr()
            self.expect_op(")")
            return value
        raise ParseError(f"unexpected {_describe(t)}", t.offset, (*_ATOM_START, "'-'", "'+'"))


def _describe(t: Token) -> str:
    return "end of input" if t.kind == "eof" else repr(t.text)


def parse_polynomial(text: str, variables: Sequence[str] | None = None) -> Polynomial:
    """Parse ``text`` into a canonical :class:`Polynomial`.

    Without ``variables`` the variable list is inferred in order of first
    occurrence.  With it, any other identifier is an error.
    """
    tokens = tokenize(text)
    if variables is None:
        seen: list[str] = []
        for t in tokens:
            if t.kind == "ident" and t.text != "i" and t.text not in seen:
                seen.append(t.text)
        variables = tuple(seen)
    else:
        variables = tuple(variables)
        if "i" in variables:
            raise StructuralError("'i' is reserved for the imaginary unit")
    return _Parser(tokens, variables).parse()
