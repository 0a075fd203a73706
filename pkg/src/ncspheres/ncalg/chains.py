"""Normalised Hochschild chains, the (b, B) operators and Chern characters.

A chain of degree k is a finite sum of coefficient-weighted tuples
``(w_0, w_1, ..., w_k)`` of normal words. Slots 1..k live in the quotient of
the algebra by its scalars, which is implemented by discarding every tuple
that has the empty word in one of those slots.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from ..scalars import QLaurent, QRatFunc
from .matrices import MatNC, NotSquare
from .presentation import NCPoly, Presentation


class DegreeZero(ValueError):
    pass


class _Sentinel:
    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return self.name

    __str__ = __repr__


ProportionalToZero = _Sentinel("ProportionalToZero")
NotProportional = _Sentinel("NotProportional")


def _add_into(acc: dict, key, c):
    s = acc.get(key)
    if s is None:
        acc[key] = c
    else:
        s = s + c
        if s:
            acc[key] = s
        else:
            del acc[key]


class CyclicChain:
    """An element of ``A (x) Abar^{(x)k}`` for a presented algebra A."""

    __slots__ = ("alg", "degree", "terms")

    def __init__(self, alg: Presentation, degree: int, terms: Mapping[tuple, object] | None = None):
        self.alg = alg
        self.degree = degree
        clean: dict = {}
        for key, c in (terms or {}).items():
            if len(key) != degree + 1:
                raise ValueError(f"tensor of length {len(key)} in a degree-{degree} chain")
            if any(not w for w in key[1:]):
                continue
            c = alg.ring.lift(c)
            if c:
                _add_into(clean, tuple(tuple(w) for w in key), c)
        self.terms = clean

    @classmethod
    def _raw(cls, alg, degree, terms) -> "CyclicChain":
        obj = cls.__new__(cls)
        obj.alg, obj.degree, obj.terms = alg, degree, terms
        return obj

    @classmethod
    def tensor(cls, polys: Sequence[NCPoly], coeff=1) -> "CyclicChain":
        """The elementary tensor ``p_0 (x) p_1 (x) ... (x) p_k``."""
        alg = polys[0].alg
        partial = {(): alg.ring.lift(coeff)}
        for slot, p in enumerate(polys):
            nxt: dict = {}
            for key, c in partial.items():
                for w, c2 in p.terms.items():
                    if slot and not w:
                        continue
                    _add_into(nxt, key + (w,), c * c2)
            partial = nxt
        return cls._raw(alg, len(polys) - 1, partial)

    # vector space structure ---------------------------------------------------

    def _check(self, other: "CyclicChain"):
        if other.alg is not self.alg or other.degree != self.degree:
            raise ValueError("chains of different algebras or degrees")

    def __add__(self, other: "CyclicChain") -> "CyclicChain":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        return CyclicChain._raw(self.alg, self.degree, out)

    def __neg__(self) -> "CyclicChain":
        return CyclicChain._raw(self.alg, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "CyclicChain") -> "CyclicChain":
        return self + (-other)

    def scale(self, c) -> "CyclicChain":
        c = self.alg.ring.lift(c)
        return CyclicChain._raw(
            self.alg, self.degree, {k: v * c for k, v in self.terms.items() if v * c}
        )

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, CyclicChain)
            and self.alg is other.alg
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def text(self, limit: int | None = None) -> str:
        if not self.terms:
            return "0"
        lines = []
        for key, c in sorted(self.terms.items(), key=lambda kv: [self.alg.order_key(w) for w in kv[0]]):
            coeff = c.text(compact=True) if hasattr(c, "text") else str(c)
            lines.append(f"({coeff}) " + " (x) ".join(self.alg.word_text(w) for w in key))
            if limit is not None and len(lines) >= limit:
                lines.append(f"... {len(self.terms) - limit} more terms")
                break
        return "\n".join(lines)

    def __repr__(self):
        return f"CyclicChain[{self.alg.name}, degree {self.degree}, {len(self.terms)} terms]"


def hochschild_b(c: CyclicChain) -> CyclicChain:
    """Hochschild boundary on normalised chains."""
    n = c.degree
    if n < 1:
        raise DegreeZero("b is not defined on degree-0 chains")
    alg = c.alg
    out: dict = {}
    for key, coef in c.terms.items():
        for j in range(n):
            sign_coef = coef if j % 2 == 0 else -coef
            for w, c2 in alg._concat_normal(key[j], key[j + 1]).items():
                if j and not w:
                    continue
                _add_into(out, key[:j] + (w,) + key[j + 2 :], sign_coef * c2)
        sign_coef = coef if n % 2 == 0 else -coef
        for w, c2 in alg._concat_normal(key[n], key[0]).items():
            _add_into(out, (w,) + key[1:n], sign_coef * c2)
    return CyclicChain._raw(alg, n - 1, out)


def connes_B(c: CyclicChain, *, averaged: bool = False) -> CyclicChain:
    """Connes' operator ``B = B_0 N`` with ``N = sum_j (-1)^{nj} t^j``.

    With ``averaged=True`` the cyclic sum is divided by ``n + 1``; that
    variant squares to zero but does not anticommute with ``b``.
    """
    n = c.degree
    alg = c.alg
    out: dict = {}
    for key, coef in c.terms.items():
        for j in range(n + 1):
            rotated = key[j:] + key[:j]
            if any(not w for w in rotated):
                continue
            sign_coef = -coef if (n * j) % 2 else coef
            _add_into(out, ((),) + rotated, sign_coef)
    chain = CyclicChain._raw(alg, n + 1, out)
    if averaged:
        chain = chain.scale(Fraction(1, n + 1))
    return chain


def cyclic_tensor(mats: Sequence[MatNC], coeff=1) -> CyclicChain:
    """``sum over index cycles of M0[i0,i1] (x) M1[i1,i2] (x) ... (x) M_last[i_last,i0]``."""
    alg = mats[0].alg
    r = mats[0].size
    for m in mats:
        if m.size != r:
            raise NotSquare("matrices of different sizes")
    m_count = len(mats)
    entries = []
    for s, m in enumerate(mats):
        table = []
        for i in range(r):
            row = []
            for j in range(r):
                terms = [(w, c) for w, c in m.rows[i][j].terms.items() if (w or s == 0)]
                row.append(terms)
            table.append(row)
        entries.append(table)
    coeff = alg.ring.lift(coeff)
    total: dict = {}
    for i0 in range(r):
        states = {(i0, ()): coeff}
        for s in range(m_count):
            last = s == m_count - 1
            nxt: dict = {}
            table = entries[s]
            for (i, key), c in states.items():
                targets = (i0,) if last else range(r)
                for j in targets:
                    for w, c2 in table[i][j]:
                        _add_into(nxt, (j, key + (w,)), c * c2)
            states = nxt
        for (_, key), c in states.items():
            _add_into(total, key, c)
    return CyclicChain._raw(alg, m_count - 1, total)


def chern_even(e: MatNC, k: int) -> CyclicChain:
    """``ch_k(e) = (e - 1/2) (x) e (x) ... (x) e`` traced over index cycles, degree 2k."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    shifted = e - MatNC.identity(e.alg, e.size, Fraction(1, 2))
    return cyclic_tensor([shifted] + [e] * (2 * k))


def chern_odd(u: MatNC, k: int) -> CyclicChain:
    """``ch_{k+1/2}(u)``: alternating tensors of u and u*, degree 2k+1.

    The normalisation is 1/2 for k = 0 and 1 otherwise.
    """
    if k < 0:
        raise ValueError("degree must be non-negative")
    us = u.star()
    factors_a = [u, us] * (k + 1)
    factors_b = [us, u] * (k + 1)
    lam = Fraction(1, 2) if k == 0 else Fraction(1)
    return cyclic_tensor(factors_a, lam) - cyclic_tensor(factors_b, lam)


def _ratio(x, y):
    if isinstance(x, QLaurent) and isinstance(y, QLaurent):
        try:
            return QRatFunc(x, y)
        except TypeError:
            return (x, y)
    try:
        return x * y.inverse()
    except Exception:
        return (x, y)


def proportionality(x: CyclicChain, y: CyclicChain):
    """Return c with ``x = c*y``, or one of the two sentinels."""
    if x.is_zero() and y.is_zero():
        return ProportionalToZero
    if x.is_zero() or y.is_zero() or set(x.terms) != set(y.terms):
        return NotProportional
    t = next(iter(y.terms))
    xt, yt = x.terms[t], y.terms[t]
    for s in y.terms:
        if x.terms[s] * yt != y.terms[s] * xt:
            return NotProportional
    return _ratio(xt, yt)


def cycle_ratio(m: MatNC, kind: str, k: int):
    """Compare ``B ch_k`` with ``b ch_{k+1}`` for an idempotent or a unitary."""
    if kind == "even":
        lower, upper = chern_even(m, k), chern_even(m, k + 1)
    elif kind == "odd":
        lower, upper = chern_odd(m, k), chern_odd(m, k + 1)
    else:
        raise ValueError(kind)
    return proportionality(connes_B(lower), hochschild_b(upper))
