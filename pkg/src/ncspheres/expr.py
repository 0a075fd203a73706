"""Text expressions for algebra elements.

Grammar::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' exponent)?
    atom   := NUMBER | NAME | '(' expr ')'
    exponent := ['-'] INTEGER | '(' ['-'] INTEGER ['/' INTEGER] ')'

Names resolve to generators of the target algebra first (``x0``, ``x1'``,
``z2``, ``G1``, ``u1``, ``x``), then to the scalars ``q``, ``L<j><k>`` and
``i``. Division is allowed only by invertible scalars.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .ncalg import NCPoly, Presentation
from .scalars import GaussRational, Phase, QLaurent


class ParseError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*'?)|(?P<op>[-+*/^()]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r} at position {pos}")
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, alg: Presentation):
        self.toks = _tokenize(text)
        self.i = 0
        self.alg = alg

    # token helpers
    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, op: str) -> bool:
        t = self.peek()
        if t.kind == "op" and t.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str):
        if not self.accept(op):
            t = self.peek()
            raise ParseError(f"expected {op!r} at position {t.pos}, found {t.text or 'end of input'!r}")

    # grammar
    def parse(self) -> NCPoly:
        value = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r} at position {t.pos}")
        return value

    def expr(self) -> NCPoly:
        neg = False
        if self.accept("-"):
            neg = True
        else:
            self.accept("+")
        value = self.term()
        if neg:
            value = -value
        while True:
            if self.accept("+"):
                value = value + self.term()
            elif self.accept("-"):
                value = value - self.term()
            else:
                return value

    def term(self) -> NCPoly:
        value = self.factor()
        while True:
            if self.accept("*"):
                value = value * self.factor()
            elif self.accept("/"):
                pos = self.peek().pos
                divisor = self.factor()
                value = value.scale(self._invert(divisor, pos))
            else:
                return value

    def exponent(self) -> Fraction:
        if self.accept("("):
            sign = -1 if self.accept("-") else 1
            num = self._integer()
            den = self._integer() if self.accept("/") else 1
            self.expect(")")
            return Fraction(sign * num, den)
        sign = -1 if self.accept("-") else 1
        return Fraction(sign * self._integer())

    def _integer(self) -> int:
        t = self.take()
        if t.kind != "num":
            raise ParseError(f"expected an integer at position {t.pos}")
        return int(t.text)

    def factor(self) -> NCPoly:
        t = self.peek()
        if t.kind == "name" and re.fullmatch(r"L\d\d", t.text) and not self.alg.has_gen(t.text):
            self.take()
            exp = self.exponent() if self.accept("^") else Fraction(1)
            return self._phase(t, exp)
        base = self.atom()
        if self.accept("^"):
            pos = self.peek().pos
            exp = self.exponent()
            if exp.denominator != 1:
                raise ParseError(f"fractional exponent at position {pos} is only allowed on phases")
            k = int(exp)
            if k < 0:
                return self.alg.scalar(self._invert(base, pos)) ** (-k)
            return base**k
        return base

    def atom(self) -> NCPoly:
        t = self.take()
        alg = self.alg
        if t.kind == "num":
            return alg.scalar(int(t.text))
        if t.kind == "op" and t.text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if t.kind == "name":
            if alg.has_gen(t.text):
                return alg.element(t.text)
            if t.text == "q":
                if alg.ring is not QLaurent:
                    raise ParseError(f"q is not a scalar of {alg.name}")
                return alg.scalar(QLaurent.monomial(1))
            if t.text == "i":
                return alg.scalar(GaussRational(0, 1))
            raise ParseError(f"unknown name {t.text!r} at position {t.pos} for algebra {alg.name}")
        raise ParseError(f"unexpected {t.text or 'end of input'!r} at position {t.pos}")

    def _phase(self, t: _Tok, exp: Fraction) -> NCPoly:
        if self.alg.ring is not Phase:
            raise ParseError(f"phase {t.text} is not a scalar of {self.alg.name}")
        j, k = int(t.text[1]), int(t.text[2])
        return self.alg.scalar(Phase.lam(j, k, exp))

    def _invert(self, value: NCPoly, pos: int):
        if any(w for w in value.terms):
            raise ParseError(f"division by a non-scalar at position {pos}")
        c = value.constant_term()
        if not c:
            raise ParseError(f"division by zero at position {pos}")
        items = list(c.items())
        if len(items) != 1:
            raise ParseError(f"division by a non-invertible scalar at position {pos}")
        if isinstance(c, QLaurent):
            ((e, v),) = items
            inv = Fraction(1) / v if not isinstance(v, GaussRational) else v.inverse()
            return QLaurent({-e: inv})
        return c.inverse()


def parse_expression(text: str, alg: Presentation) -> NCPoly:
    """Parse ``text`` into a normal-form element of ``alg``."""
    return _Parser(text, alg).parse()
