"""Finitely presented *-algebras with length-two rewrite rules.

A :class:`Presentation` owns a list of generators, an involution on them, and
rewrite rules ``(a, b) -> sum c_w w`` keyed by two-letter patterns. Words are
tuples of generator ids. Normal forms are computed with memoisation, so
repeated products inside a computation cost a dictionary lookup.

Termination is certified by a weighted degree-lexicographic order: every
generator carries a positive weight and a rank, words compare first by total
weight and then lexicographically by rank. Since the order is compatible with
concatenation, checking that every rule strictly decreases it is enough.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from ..scalars import QLaurent

Word = tuple  # tuple[int, ...]


@dataclass(frozen=True)
class Generator:
    index: int
    starred: bool
    name: str
    self_adjoint: bool = False

    @property
    def display(self) -> str:
        return self.name + ("'" if self.starred else "")


class RewriteError(RuntimeError):
    """A rule set failed its termination certificate."""


@dataclass
class ProbeReport:
    presentation: str
    trials: int
    seed: int
    discrepancies: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.discrepancies


class Presentation:
    """Generators, involution and rewrite rules of a presented *-algebra.

    ``ring`` is the coefficient class (``QLaurent`` or ``Phase``); it must
    provide ``const`` and ``lift``. ``weights`` and ``ranks`` define the
    termination order; by default the rank is the generator's position and
    the weight is ``index + 1``.
    """

    def __init__(
        self,
        name: str,
        generators: Sequence[Generator],
        ring=QLaurent,
        *,
        weights: Sequence[int] | None = None,
        ranks: Sequence[int] | None = None,
        source: str = "",
    ):
        self.name = name
        self.generators = tuple(generators)
        self.ring = ring
        self.one = ring.const(1)
        self.source = source
        self._by_name = {g.display: i for i, g in enumerate(self.generators)}
        adj = []
        for i, g in enumerate(self.generators):
            if g.self_adjoint:
                adj.append(i)
            else:
                key = g.name + ("" if g.starred else "'")
                if key not in self._by_name:
                    raise ValueError(f"generator {g.display} has no adjoint partner")
                adj.append(self._by_name[key])
        self.adjoint = tuple(adj)
        self.weights = tuple(weights) if weights else tuple(g.index + 1 for g in self.generators)
        self.ranks = tuple(ranks) if ranks else tuple(range(len(self.generators)))
        if any(w <= 0 for w in self.weights):
            raise ValueError("generator weights must be positive")
        self.rules: dict[tuple[int, int], tuple[tuple[Word, object], ...]] = {}
        self._nf_cache: dict[Word, dict] = {}
        self._frozen = False

    # -- construction ---------------------------------------------------------

    def gen(self, display: str) -> int:
        return self._by_name[display]

    def has_gen(self, display: str) -> bool:
        return display in self._by_name

    def add_rule(self, lhs: tuple[int, int], rhs: Mapping[Word, object]):
        if self._frozen:
            raise RuntimeError("presentation is frozen")
        clean = tuple(
            (tuple(w), self.ring.lift(c)) for w, c in rhs.items() if self.ring.lift(c)
        )
        self.rules[tuple(lhs)] = clean
        self._nf_cache.clear()

    def freeze(self, *, check: bool = True) -> "Presentation":
        if check:
            self.check_certificate()
            for (a, b), rhs in self.rules.items():
                for w, _ in rhs:
                    if not self.is_normal(w):
                        raise RewriteError(
                            f"replacement {self.word_text(w)} of rule "
                            f"{self.word_text((a, b))} is not normal"
                        )
        self._frozen = True
        return self

    def order_key(self, w: Word) -> tuple:
        return (sum(self.weights[g] for g in w), tuple(self.ranks[g] for g in w))

    def check_certificate(self):
        for lhs, rhs in self.rules.items():
            k = self.order_key(lhs)
            for w, _ in rhs:
                if not self.order_key(w) < k:
                    raise RewriteError(
                        f"rule {self.word_text(lhs)} -> {self.word_text(w)} "
                        "does not decrease the word order"
                    )

    # -- normal forms ---------------------------------------------------------

    def is_normal(self, w: Word) -> bool:
        rules = self.rules
        return not any((w[i], w[i + 1]) in rules for i in range(len(w) - 1))

    def _insert(self, v: Word, g: int) -> dict:
        """Normal form of ``v + (g,)`` for a normal word ``v``."""
        w = v + (g,)
        cached = self._nf_cache.get(w)
        if cached is not None:
            return cached
        rhs = self.rules.get((v[-1], g)) if v else None
        if rhs is None:
            result = {w: self.one}
        else:
            prefix = v[:-1]
            result: dict = {}
            for rw, c in rhs:
                for nw, c2 in self._concat_normal(prefix, rw).items():
                    s = result.get(nw)
                    result[nw] = c * c2 if s is None else s + c * c2
            result = {k: c for k, c in result.items() if c}
        self._nf_cache[w] = result
        return result

    def _concat_normal(self, prefix: Word, suffix: Word) -> dict:
        """Normal form of ``prefix + suffix`` where ``prefix`` is normal."""
        whole = prefix + suffix
        cached = self._nf_cache.get(whole)
        if cached is not None:
            return cached
        acc = {prefix: self.one}
        for g in suffix:
            new: dict = {}
            for v, c in acc.items():
                for v2, c2 in self._insert(v, g).items():
                    s = new.get(v2)
                    new[v2] = c * c2 if s is None else s + c * c2
            acc = {k: c for k, c in new.items() if c}
        self._nf_cache[whole] = acc
        return acc

    def reduce_word(self, w: Word) -> dict:
        """Normal form of a single word, as a map word -> coefficient."""
        return self._concat_normal((), tuple(w))

    def reduce_word_strategy(self, w: Word, strategy: str, memo: dict | None = None) -> dict:
        """Reduce by repeatedly rewriting the leftmost or rightmost redex.

        This deliberately bypasses the insertion-based normaliser so that it
        can serve as an independent check of it.
        """
        if strategy not in ("leftmost", "rightmost"):
            raise ValueError(strategy)
        memo = {} if memo is None else memo
        rules = self.rules
        one = self.one
        if strategy == "rightmost":
            return self._reduce_rightmost(tuple(w), memo)

        def red(word: Word, lo: int) -> dict:
            # no redex starts before lo; the bound only narrows the search
            # and never changes which redex is chosen
            hit = memo.get(word)
            if hit is not None:
                return hit
            pos = None
            for i in range(max(lo, 0), len(word) - 1):
                if (word[i], word[i + 1]) in rules:
                    pos = i
                    break
            if pos is None:
                out = {word: one}
            else:
                out = {}
                head, tail = word[:pos], word[pos + 2 :]
                for rw, c in rules[(word[pos], word[pos + 1])]:
                    sub = red(head + rw + tail, pos - 1)
                    for nw, c2 in sub.items():
                        t = c if c2 is one else c * c2
                        s = out.get(nw)
                        out[nw] = t if s is None else s + t
                out = {k: v for k, v in out.items() if v}
            memo[word] = out
            return out

        return red(tuple(w), 0)

    def _reduce_rightmost(self, w: Word, memo: dict) -> dict:
        """Rightmost-redex reduction.

        A redex at the first position is only rewritten once everything after
        it is normal, so the suffix is reduced first and the first letter is
        then pushed into each normal word of the result.
        """
        rules = self.rules
        one = self.one

        def red(word: Word) -> dict:
            hit = memo.get(word)
            if hit is not None:
                return hit
            if len(word) < 2:
                out = {word: one}
            else:
                g = word[0]
                out = {}
                for u, c in red(word[1:]).items():
                    key = (g, u[0]) if u else None
                    if key in rules:
                        for rw, c1 in rules[key]:
                            base = c if c1 is one else (c1 if c is one else c * c1)
                            for nw, c2 in red(rw + u[1:]).items():
                                t = base if c2 is one else base * c2
                                s = out.get(nw)
                                out[nw] = t if s is None else s + t
                    else:
                        nw = (g,) + u
                        s = out.get(nw)
                        out[nw] = c if s is None else s + c
                out = {k: v for k, v in out.items() if v}
            memo[word] = out
            return out

        return red(w)

    # -- helpers --------------------------------------------------------------

    def word_text(self, w: Word) -> str:
        if not w:
            return "1"
        out = []
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            name = self.generators[w[i]].display
            out.append(name if j - i == 1 else f"{name}^{j - i}")
            i = j
        return "*".join(out)

    def star_word(self, w: Word) -> Word:
        return tuple(self.adjoint[g] for g in reversed(w))

    def poly(self, terms: Mapping[Word, object] | None = None) -> "NCPoly":
        return NCPoly.from_raw(self, terms or {})

    def element(self, display: str) -> "NCPoly":
        return NCPoly._from_normal(self, {(self.gen(display),): self.one})

    def scalar(self, c) -> "NCPoly":
        c = self.ring.lift(c)
        return NCPoly._from_normal(self, {(): c} if c else {})

    def __repr__(self):
        return f"<Presentation {self.name}: {len(self.generators)} generators, {len(self.rules)} rules>"


class NCPoly:
    """A normal-form element of a presented algebra."""

    __slots__ = ("alg", "terms", "_hash")

    def __init__(self, alg: Presentation, terms: Mapping[Word, object]):
        self.alg = alg
        self.terms = dict(terms)
        self._hash = None

    @classmethod
    def _from_normal(cls, alg: Presentation, terms: dict) -> "NCPoly":
        obj = cls.__new__(cls)
        obj.alg = alg
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def from_raw(cls, alg: Presentation, terms: Mapping[Word, object]) -> "NCPoly":
        acc: dict = {}
        for w, c in terms.items():
            c = alg.ring.lift(c)
            if not c:
                continue
            for nw, c2 in alg.reduce_word(tuple(w)).items():
                s = acc.get(nw)
                acc[nw] = c * c2 if s is None else s + c * c2
        return cls._from_normal(alg, {k: v for k, v in acc.items() if v})

    # arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            if other.alg is not self.alg:
                raise ValueError(f"mixing elements of {self.alg.name} and {other.alg.name}")
            return other
        return self.alg.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            if s is None:
                out[w] = c
            else:
                s = s + c
                if s:
                    out[w] = s
                else:
                    del out[w]
        return NCPoly._from_normal(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._from_normal(self.alg, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "NCPoly":
        c = self.alg.ring.lift(c)
        if not c:
            return NCPoly._from_normal(self.alg, {})
        out = {}
        for w, x in self.terms.items():
            y = x * c
            if y:
                out[w] = y
        return NCPoly._from_normal(self.alg, out)

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            return self.scale(other)
        other = self._coerce(other)
        alg = self.alg
        acc: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                c = c1 * c2
                for w, c3 in alg._concat_normal(w1, w2).items():
                    s = acc.get(w)
                    acc[w] = c * c3 if s is None else s + c * c3
        return NCPoly._from_normal(alg, {k: v for k, v in acc.items() if v})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        result = self.alg.scalar(1)
        for _ in range(k):
            result = result * self
        return result

    def star(self) -> "NCPoly":
        alg = self.alg
        return NCPoly.from_raw(
            alg, {alg.star_word(w): c.conjugate() for w, c in self.terms.items()}
        )

    def commutator(self, other) -> "NCPoly":
        other = self._coerce(other)
        return self * other - other * self

    # inspection -------------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get((), self.alg.ring.const(0))

    def without_constant(self) -> "NCPoly":
        return NCPoly._from_normal(self.alg, {w: c for w, c in self.terms.items() if w})

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.alg is other.alg and self.terms == other.terms
        try:
            return self == self.alg.scalar(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.alg), frozenset(self.terms.items())))
        return self._hash

    def map_coefficients(self, f: Callable) -> "NCPoly":
        out = {}
        for w, c in self.terms.items():
            y = f(c)
            if y:
                out[w] = y
        return NCPoly._from_normal(self.alg, out)

    def substitute(self, target: Presentation, images: Sequence["NCPoly"], coeff_map: Callable | None = None) -> "NCPoly":
        """Apply the algebra map sending generator ``i`` to ``images[i]``."""
        cache: dict = {}
        result = target.scalar(0)
        for w, c in self.terms.items():
            term = cache.get(w)
            if term is None:
                term = target.scalar(1)
                for g in w:
                    term = term * images[g]
                cache[w] = term
            cc = coeff_map(c) if coeff_map else c
            result = result + term.scale(cc)
        return result

    def text(self) -> str:
        if not self.terms:
            return "0"
        alg = self.alg
        items = sorted(
            self.terms.items(),
            key=lambda kv: (bool(kv[0]), alg.order_key(kv[0])),
        )
        items = [kv for kv in items if not kv[0]] + [kv for kv in reversed(items) if kv[0]]
        pieces = []
        for w, c in items:
            neg, mag = split_sign(c)
            coeff = mag.text(compact=True) if hasattr(mag, "text") else str(mag)
            if not w:
                body = coeff
            elif coeff == "1":
                body = alg.word_text(w)
            elif _single_term(mag):
                body = f"{coeff}*{alg.word_text(w)}"
            else:
                body = f"({coeff})*{alg.word_text(w)}"
            pieces.append(("-" if neg else "+", body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"NCPoly[{self.alg.name}]({self.text()})"


def _single_term(c) -> bool:
    items = getattr(c, "items", None)
    return items is None or len(list(items())) <= 1


def split_sign(c):
    """Return ``(negative, magnitude)`` for a single-term coefficient with a
    negative real leading number; otherwise ``(False, c)``."""
    items = getattr(c, "items", None)
    if items is None:
        return (c < 0, -c) if isinstance(c, (int,)) or hasattr(c, "denominator") else (False, c)
    terms = list(items())
    if len(terms) != 1:
        return False, c
    _, v = terms[0]
    real = getattr(v, "im", 0) == 0
    value = getattr(v, "re", v)
    if real and value < 0:
        return True, -c
    return False, c


def normal_form(p, alg: Presentation) -> NCPoly:
    """Normal form of a raw expression: a mapping word -> coefficient or an NCPoly."""
    if isinstance(p, NCPoly):
        return NCPoly.from_raw(alg, p.terms)
    return NCPoly.from_raw(alg, p)


def star(p: NCPoly) -> NCPoly:
    return p.star()


def random_word(rng: random.Random, alg: Presentation, max_len: int = 12) -> Word:
    n = rng.randint(0, max_len)
    k = len(alg.generators)
    return tuple(rng.randrange(k) for _ in range(n))


def confluence_probe(
    alg: Presentation,
    trials: int,
    seed: int = 0,
    max_len: int = 12,
    strategies: Sequence[str] = ("insertion", "rightmost"),
) -> ProbeReport:
    """Reduce random words under several redex strategies and compare the results.

    ``insertion`` is the memoised normaliser used everywhere else. It always
    rewrites the leftmost redex, because the prefix it extends is normal.
    ``leftmost`` and ``rightmost`` rewrite one redex at a time without
    sharing the normaliser's cache.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if len(strategies) < 2:
        raise ValueError("need at least two strategies to compare")
    for name in strategies:
        if name not in ("insertion", "leftmost", "rightmost"):
            raise ValueError(f"unknown strategy {name!r}")
    rng = random.Random(seed)
    report = ProbeReport(alg.name, trials, seed)
    memos = {name: {} for name in strategies}
    for _ in range(trials):
        w = random_word(rng, alg, max_len)
        results = [
            alg.reduce_word(w) if name == "insertion" else alg.reduce_word_strategy(w, name, memos[name])
            for name in strategies
        ]
        if any(r != results[0] for r in results[1:]):
            report.discrepancies.append(
                (alg.word_text(w),) + tuple(NCPoly._from_normal(alg, r).text() for r in results)
            )
    return report


def words_up_to(alg: Presentation, degree: int) -> Iterable[Word]:
    """All normal words of length at most ``degree``."""
    frontier = [()]
    yield ()
    for _ in range(degree):
        nxt = []
        for w in frontier:
            for g in range(len(alg.generators)):
                v = w + (g,)
                if alg.is_normal(v):
                    nxt.append(v)
                    yield v
        frontier = nxt
