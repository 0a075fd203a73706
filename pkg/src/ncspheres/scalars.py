"""Exact coefficient rings.

Four scalar types live here:

* ``Fraction`` from the standard library serves as the rational field.
* :class:`GaussRational` is the field Q(i).
* :class:`QLaurent` is a Laurent polynomial in a formal real parameter ``q``.
  Coefficients are usually rationals and may be Gaussian rationals.
* :class:`QRatFunc` is a quotient of two Laurent polynomials, kept in lowest
  terms.
* :class:`Phase` is a Laurent polynomial in formal unit-modulus parameters
  ``L_jk`` with half-integer exponents.

Every value is immutable. Arithmetic never touches floating point; floats
appear only in :func:`evaluate_numeric`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Union

__all__ = [
    "DivisionByZero",
    "NotInvertible",
    "PoleAtValue",
    "GaussRational",
    "QLaurent",
    "QRatFunc",
    "Phase",
    "I",
    "q_derivative_at_1",
    "evaluate_numeric",
    "scalar_arith",
    "as_fraction",
]

EXPONENT_LIMIT = 2**31


class DivisionByZero(ZeroDivisionError):
    """Raised when inverting an exact zero."""


class NotInvertible(ArithmeticError):
    """Raised when inverting a ring element that has no inverse in its ring."""


class PoleAtValue(ArithmeticError):
    """Raised when a rational function is evaluated at a root of its denominator."""


def _compact(x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def _fmt_frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------


class GaussRational:
    """An element ``re + im*i`` of Q(i)."""

    __slots__ = ("re", "im")

    # Parts are stored as int when integral and as Fraction otherwise; the two
    # compare and hash equal, and ints keep the hot multiplication path cheap.
    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _compact(as_fraction(re)))
        object.__setattr__(self, "im", _compact(as_fraction(im)))

    @classmethod
    def _make(cls, re, im) -> "GaussRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", _compact(re))
        object.__setattr__(obj, "im", _compact(im))
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    @staticmethod
    def lift(x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        return GaussRational(x, 0)

    def __add__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational._make(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussRational._make(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussRational._make(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, (GaussRational, int, Fraction)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return GaussRational._make(a * c, 0)
            return GaussRational._make(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return GaussRational._make(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussRational":
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of 0 in Q(i)")
        return GaussRational(Fraction(self.re) / n, -Fraction(self.im) / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by 0")
            return GaussRational(Fraction(self.re) / other, Fraction(self.im) / other)
        if isinstance(other, GaussRational):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return GaussRational.lift(other) * self.inverse()

    def conjugate(self) -> "GaussRational":
        return GaussRational._make(self.re, -self.im)

    conj = conjugate

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"GaussRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if self.im == 0:
            return _fmt_frac(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{_fmt_frac(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        im = "i" if mag == 1 else f"{_fmt_frac(mag)}*i"
        return f"({_fmt_frac(self.re)}{sign}{im})"


I = GaussRational(0, 1)


def _conj(c):
    return c.conjugate() if isinstance(c, GaussRational) else c


def _simplify_coeff(c):
    """Demote to the simplest exact type: Gaussian rational, Fraction or int."""
    if isinstance(c, GaussRational):
        if c.im:
            return c
        c = c.re
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _is_exact_number(x) -> bool:
    return isinstance(x, (int, Fraction, GaussRational))


def _coeff_str(c) -> str:
    if isinstance(c, GaussRational):
        return str(c)
    return _fmt_frac(Fraction(c))


def _check_exponent(e: int) -> int:
    if not -EXPONENT_LIMIT <= e < EXPONENT_LIMIT:
        raise OverflowError(f"Laurent exponent {e} outside the supported range")
    return e


# ---------------------------------------------------------------------------
# Laurent polynomials in q
# ---------------------------------------------------------------------------


class QLaurent:
    """A finite sum ``sum_e c_e q^e`` with exact coefficients.

    >>> one_minus = QLaurent({0: 1, -2: -1})
    >>> str(one_minus)
    '1 - q^-2'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean: dict[int, object] = {}
        if terms:
            for e, c in terms.items():
                if not _is_exact_number(c):
                    raise TypeError(f"inexact coefficient {c!r}")
                c = _simplify_coeff(c if isinstance(c, GaussRational) else Fraction(c))
                if c:
                    clean[_check_exponent(int(e))] = c
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("QLaurent is immutable")

    @classmethod
    def _raw(cls, terms: dict) -> "QLaurent":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def const(cls, c) -> "QLaurent":
        return cls({0: c})

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> "QLaurent":
        return cls({exponent: coeff})

    @classmethod
    def lift(cls, x) -> "QLaurent":
        if isinstance(x, QLaurent):
            return x
        if _is_exact_number(x):
            return cls.const(x)
        raise TypeError(f"cannot lift {x!r} to QLaurent")

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, e: int):
        return self._terms.get(e, Fraction(0))

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(e == 0 for e in self._terms)

    def constant_term(self):
        return self._terms.get(0, Fraction(0))

    def min_exponent(self) -> int:
        return min(self._terms)

    def max_exponent(self) -> int:
        return max(self._terms)

    def __add__(self, other):
        if not isinstance(other, QLaurent):
            if not _is_exact_number(other):
                return NotImplemented
            other = QLaurent.const(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = _simplify_coeff(s + c)
                if s:
                    out[e] = s
                else:
                    del out[e]
        return QLaurent._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, QLaurent):
            if not _is_exact_number(other):
                return NotImplemented
            other = QLaurent.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QLaurent):
            if not _is_exact_number(other):
                return NotImplemented
            if not other:
                return QLaurent._raw({})
            return QLaurent._raw(
                {e: _simplify_coeff(c * other) for e, c in self._terms.items()}
            )
        a, b = self._terms, other._terms
        if len(b) == 1:
            a, b = b, a
        if len(a) == 1:
            # monomial times polynomial: no collisions between exponents
            ((e1, c1),) = a.items()
            if len(b) == 1:
                ((e2, c2),) = b.items()
                if type(c1) is int and type(c2) is int:
                    return QLaurent._raw({_check_exponent(e1 + e2): c1 * c2})
                return QLaurent._raw({_check_exponent(e1 + e2): _simplify_coeff(c1 * c2)})
            if c1 == 1:
                return QLaurent._raw({_check_exponent(e1 + e): c for e, c in b.items()})
            return QLaurent._raw(
                {_check_exponent(e1 + e): _simplify_coeff(c1 * c) for e, c in b.items()}
            )
        out: dict[int, object] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return QLaurent._raw(
            {
                _check_exponent(e): s
                for e, c in out.items()
                if (s := _simplify_coeff(c))
            }
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self._terms) != 1:
                raise NotInvertible("only Laurent monomials are units")
            ((e, c),) = self._terms.items()
            inv = Fraction(1) / c if not isinstance(c, GaussRational) else c.inverse()
            return QLaurent({-e: inv}) ** (-k)
        result = QLaurent.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "QLaurent":
        """Complex conjugation of the coefficients; ``q`` is real."""
        return QLaurent._raw({e: _conj(c) for e, c in self._terms.items()})

    conjugate = conj

    def substitute_inverse(self) -> "QLaurent":
        """Replace ``q`` by ``1/q``."""
        return QLaurent._raw({-e: c for e, c in self._terms.items()})

    def shift(self, k: int) -> "QLaurent":
        return QLaurent._raw({_check_exponent(e + k): c for e, c in self._terms.items()})

    def at_one(self):
        return _simplify_coeff(sum(self._terms.values(), Fraction(0)))

    def __eq__(self, other):
        if isinstance(other, QLaurent):
            return self._terms == other._terms
        if _is_exact_number(other):
            return self == QLaurent.const(other)
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(frozenset(self._terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"QLaurent({self._terms!r})"

    def text(self, compact: bool = False) -> str:
        if not self._terms:
            return "0"
        parts: list[tuple[str, str]] = []
        for e in sorted(self._terms, reverse=True):
            c = self._terms[e]
            neg = not isinstance(c, GaussRational) and c < 0
            mag = -c if neg else c
            if e == 0:
                body = _coeff_str(mag)
            else:
                qp = "q" if e == 1 else f"q^{e}"
                body = qp if mag == 1 else f"{_coeff_str(mag)}*{qp}"
            parts.append(("-" if neg else "+", body))
        sep = "{}" if compact else " {} "
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += sep.format(sign) + body
        return out

    def __str__(self):
        return self.text()


def q_derivative_at_1(p: QLaurent):
    """Value of dp/dq at q = 1, i.e. the sum of exponent times coefficient."""
    p = QLaurent.lift(p)
    total = Fraction(0)
    for e, c in p.items():
        total = total + e * c
    return _simplify_coeff(total)


# ---------------------------------------------------------------------------
# Univariate polynomial helpers (dense coefficient lists, low degree first)
# ---------------------------------------------------------------------------


def _poly_trim(p: list) -> list:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a: list, b: list) -> tuple[list, list]:
    a = list(a)
    b = _poly_trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    lead = b[-1]
    quot = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        factor = Fraction(a[-1]) / lead
        quot[shift] = factor
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - factor * c
        a.pop()
    return _poly_trim(quot), _poly_trim(a)


def _poly_monic(p: list) -> list:
    lead = p[-1]
    return [Fraction(c) / lead for c in p]


def _poly_gcd(a: list, b: list) -> list:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return _poly_monic(a) if a else a


def _poly_deriv(p: list) -> list:
    return _poly_trim([i * c for i, c in enumerate(p)][1:])


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _squarefree_decomposition(p: list) -> list[tuple[list, int]]:
    """Yun's algorithm: returns [(a_i, i)] with p = lead * prod a_i^i."""
    p = _poly_monic(_poly_trim(list(p)))
    if len(p) <= 1:
        return []
    out = []
    dp = _poly_deriv(p)
    a = _poly_gcd(p, dp)
    b, _ = _poly_divmod(p, a)
    c, _ = _poly_divmod(dp, a)
    i = 1
    while len(b) > 1:
        d = _poly_trim([x - y for x, y in _zip_pad(c, _poly_deriv(b))])
        g = _poly_gcd(b, d) if d else _poly_monic(b)
        if len(g) > 1:
            out.append((g, i))
        b, _ = _poly_divmod(b, g)
        c, _ = _poly_divmod(d, g) if d else ([], [])
        i += 1
    return out


def _zip_pad(a: list, b: list):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


def _laurent_to_tpoly(p: QLaurent) -> tuple[list, int]:
    """Write p = q^top * P(t) with t = 1/q and P(0) != 0; return (P, top)."""
    top = p.max_exponent()
    low = p.min_exponent()
    coeffs = [Fraction(0)] * (top - low + 1)
    for e, c in p.items():
        coeffs[top - e] = c
    return coeffs, top


def _tpoly_to_laurent(coeffs: list, top: int = 0) -> QLaurent:
    return QLaurent({top - i: c for i, c in enumerate(coeffs) if c})


# ---------------------------------------------------------------------------
# Rational functions in q
# ---------------------------------------------------------------------------


class QRatFunc:
    """A rational function ``num/den`` in q with rational coefficients.

    Canonical form: numerator and denominator are coprime and the
    denominator is ``1 + (terms in negative powers of q)``, i.e. its highest
    power of q is q^0 with coefficient 1. Two values are equal exactly when
    their canonical forms coincide.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = QLaurent.lift(num)
        den = QLaurent.const(1) if den is None else QLaurent.lift(den)
        if not den:
            raise DivisionByZero("zero denominator")
        for p in (num, den):
            if any(isinstance(c, GaussRational) for _, c in p.items()):
                raise TypeError("QRatFunc requires rational coefficients")
        num, den = self._canonical(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("QRatFunc is immutable")

    @staticmethod
    def _canonical(num: QLaurent, den: QLaurent) -> tuple[QLaurent, QLaurent]:
        if not num:
            return num, QLaurent.const(1)
        if len(den.terms) > 1 and len(num.terms) > 0:
            pn, tn = _laurent_to_tpoly(num)
            pd, td = _laurent_to_tpoly(den)
            g = _poly_gcd(pn, pd)
            if len(g) > 1:
                pn, _ = _poly_divmod(pn, g)
                pd, _ = _poly_divmod(pd, g)
            num = _tpoly_to_laurent(pn, tn)
            den = _tpoly_to_laurent(pd, td)
        top = den.max_exponent()
        lead = den.coefficient(top)
        num = num.shift(-top) * (Fraction(1) / lead)
        den = den.shift(-top) * (Fraction(1) / lead)
        return num, den

    @classmethod
    def lift(cls, x) -> "QRatFunc":
        if isinstance(x, QRatFunc):
            return x
        return cls(x)

    def __add__(self, other):
        try:
            other = QRatFunc.lift(other)
        except TypeError:
            return NotImplemented
        if self.den == other.den:
            return QRatFunc(self.num + other.num, self.den)
        return QRatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return QRatFunc(-self.num, self.den)

    def __sub__(self, other):
        try:
            other = QRatFunc.lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = QRatFunc.lift(other)
        except TypeError:
            return NotImplemented
        return QRatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "QRatFunc":
        if not self.num:
            raise DivisionByZero("inverse of zero rational function")
        return QRatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * QRatFunc.lift(other).inverse()

    def __rtruediv__(self, other):
        return QRatFunc.lift(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return QRatFunc(self.num**k, self.den**k)

    def conj(self) -> "QRatFunc":
        return self

    conjugate = conj

    def __bool__(self):
        return bool(self.num)

    def is_constant(self) -> bool:
        return self.den == 1 and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return Fraction(self.num.constant_term())

    def __eq__(self, other):
        if isinstance(other, QRatFunc):
            return self.num == other.num and self.den == other.den
        try:
            return self == QRatFunc.lift(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"QRatFunc({self.num!r}, {self.den!r})"

    def __str__(self):
        if self.den == 1:
            return self.num.text()
        num = self.num.text(compact=True)
        if len(self.num.terms) > 1:
            num = f"({num})"
        return f"{num}/{self._den_text()}"

    def _den_text(self) -> str:
        pd, _ = _laurent_to_tpoly(self.den)
        factors = _squarefree_decomposition(pd)
        pieces = []
        for poly, mult in factors:
            # normalise each factor to constant term 1 in t = 1/q
            c0 = poly[0]
            poly = [Fraction(c) / c0 for c in poly]
            body = f"({_tpoly_to_laurent(poly).text(compact=True)})"
            pieces.append(body if mult == 1 else f"{body}^{mult}")
        if len(pieces) == 1:
            return pieces[0]
        return "(" + "*".join(pieces) + ")"


# ---------------------------------------------------------------------------
# Phase monomials in the deformation parameters
# ---------------------------------------------------------------------------

PhaseKey = tuple  # sorted tuple of (j, k, doubled exponent) with j < k


def _key_mul(a: PhaseKey, b: PhaseKey) -> PhaseKey:
    if not a:
        return b
    if not b:
        return a
    acc: dict[tuple[int, int], int] = {}
    for j, k, e in a:
        acc[(j, k)] = e
    for j, k, e in b:
        acc[(j, k)] = acc.get((j, k), 0) + e
    return tuple(sorted((j, k, e) for (j, k), e in acc.items() if e))


def _key_neg(a: PhaseKey) -> PhaseKey:
    return tuple((j, k, -e) for j, k, e in a)


def _key_scale(a: PhaseKey, m: int) -> PhaseKey:
    if m == 0:
        return ()
    return tuple((j, k, e * m) for j, k, e in a)


class Phase:
    """Laurent polynomial in the unit-modulus parameters ``L_jk`` (j < k).

    Exponents may be half-integers; internally they are stored doubled.
    Coefficients are Gaussian rationals. ``L_kj`` is the inverse of ``L_jk``
    and ``L_jj`` is 1.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[PhaseKey, object] | None = None):
        clean: dict[PhaseKey, GaussRational] = {}
        if terms:
            for key, c in terms.items():
                key = tuple(sorted((int(j), int(k), int(e)) for j, k, e in key if e))
                for j, k, _ in key:
                    if not j < k:
                        raise ValueError("phase index pairs must satisfy j < k")
                c = GaussRational.lift(c)
                if c:
                    prev = clean.get(key)
                    c = c if prev is None else prev + c
                    if c:
                        clean[key] = c
                    else:
                        clean.pop(key, None)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Phase is immutable")

    @classmethod
    def _raw(cls, terms: dict) -> "Phase":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def const(cls, c) -> "Phase":
        c = GaussRational.lift(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def lam(cls, j: int, k: int, exponent=1) -> "Phase":
        """The monomial ``L_jk^exponent``; exponent may be a half-integer."""
        doubled = Fraction(exponent) * 2
        if doubled.denominator != 1:
            raise ValueError("phase exponents must be half-integers")
        e = int(doubled)
        if j == k or e == 0:
            return cls.const(1)
        if j > k:
            j, k, e = k, j, -e
        return cls._raw({((j, k, e),): GaussRational(1)})

    @classmethod
    def lift(cls, x) -> "Phase":
        if isinstance(x, Phase):
            return x
        if _is_exact_number(x):
            return cls.const(x)
        raise TypeError(f"cannot lift {x!r} to Phase")

    def items(self):
        return self._terms.items()

    def __bool__(self):
        return bool(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __add__(self, other):
        if not isinstance(other, Phase):
            if not _is_exact_number(other):
                return NotImplemented
            other = Phase.const(other)
        out = dict(self._terms)
        for key, c in other._terms.items():
            s = out.get(key)
            if s is None:
                out[key] = c
            else:
                s = s + c
                if s:
                    out[key] = s
                else:
                    del out[key]
        return Phase._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Phase._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Phase):
            if not _is_exact_number(other):
                return NotImplemented
            other = Phase.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Phase):
            if not _is_exact_number(other):
                return NotImplemented
            if not other:
                return Phase._raw({})
            return Phase._raw({k: c * other for k, c in self._terms.items()})
        out: dict[PhaseKey, GaussRational] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                key = _key_mul(k1, k2)
                prev = out.get(key)
                out[key] = c1 * c2 if prev is None else prev + c1 * c2
        return Phase._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def inverse(self) -> "Phase":
        if not self._terms:
            raise DivisionByZero("inverse of zero phase polynomial")
        if len(self._terms) != 1:
            raise NotInvertible("only single-term phase polynomials are invertible")
        ((key, c),) = self._terms.items()
        return Phase._raw({_key_neg(key): c.inverse()})

    def __pow__(self, m: int):
        if m < 0:
            return self.inverse() ** (-m)
        if len(self._terms) == 1:
            ((key, c),) = self._terms.items()
            cm = GaussRational(1)
            for _ in range(m):
                cm = cm * c
            return Phase._raw({_key_scale(key, m): cm})
        result = Phase.const(1)
        for _ in range(m):
            result = result * self
        return result

    def conj(self) -> "Phase":
        return Phase._raw({_key_neg(k): c.conjugate() for k, c in self._terms.items()})

    conjugate = conj

    def at_classical_point(self) -> GaussRational:
        """Value with every ``L_jk`` set to 1."""
        total = GaussRational(0)
        for c in self._terms.values():
            total = total + c
        return total

    def __eq__(self, other):
        if isinstance(other, Phase):
            return self._terms == other._terms
        if _is_exact_number(other):
            return self == Phase.const(other)
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(frozenset(self._terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"Phase({self._terms!r})"

    @staticmethod
    def _key_text(key: PhaseKey) -> str:
        parts = []
        for j, k, e in key:
            name = f"L{j}{k}"
            if e == 2:
                parts.append(name)
            elif e % 2 == 0:
                parts.append(f"{name}^{e // 2}")
            else:
                parts.append(f"{name}^({e}/2)")
        return "*".join(parts)

    def text(self, compact: bool = False) -> str:
        if not self._terms:
            return "0"
        items = sorted(self._terms.items(), key=lambda kv: kv[0])
        pieces = []
        for key, c in items:
            neg = c.im == 0 and c.re < 0
            mag = -c if neg else c
            mono = self._key_text(key)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            pieces.append(("-" if neg else "+", body))
        sep = "{}" if compact else " {} "
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += sep.format(sign) + body
        return out

    def __str__(self):
        return self.text()


# ---------------------------------------------------------------------------
# Generic entry points
# ---------------------------------------------------------------------------

ScalarLike = Union[int, Fraction, GaussRational, QLaurent, QRatFunc, Phase]


def scalar_arith(a: ScalarLike, b: ScalarLike | None, op: str) -> ScalarLike:
    """Dispatch ``add``, ``mul``, ``neg``, ``conj`` or ``inv`` on exact scalars."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "conj":
        return a.conjugate() if hasattr(a, "conjugate") else a
    if op == "inv":
        if isinstance(a, (int, Fraction)):
            if a == 0:
                raise DivisionByZero("inverse of 0")
            return 1 / Fraction(a)
        if isinstance(a, QLaurent):
            return QRatFunc(1, a)
        return a.inverse()
    raise ValueError(f"unknown operation {op!r}")


def _eval_laurent_exact(p: QLaurent, x: Fraction):
    total = Fraction(0)
    for e, c in p.items():
        total = total + c * x**e
    return total


def evaluate_numeric(x, q_value: float):
    """Evaluate an exact q-expression at a numeric q.

    The evaluation is carried out exactly at the binary value of
    ``q_value`` and rounded once at the end, so the result is correctly
    rounded regardless of degree.
    """
    if q_value == 0:
        raise PoleAtValue("q = 0")
    xq = Fraction(q_value)
    if isinstance(x, QRatFunc):
        den = _eval_laurent_exact(x.den, xq)
        if den == 0:
            raise PoleAtValue(f"denominator vanishes at q = {q_value}")
        val = Fraction(1) * _eval_laurent_exact(x.num, xq) / den
    else:
        val = _eval_laurent_exact(QLaurent.lift(x), xq)
    if isinstance(val, GaussRational):
        return complex(float(val.re), float(val.im))
    return float(val)


def laurent_from_iter(pairs: Iterable[tuple[int, object]]) -> QLaurent:
    acc: dict[int, object] = {}
    for e, c in pairs:
        acc[e] = acc.get(e, 0) + c
    return QLaurent(acc)
