"""Fredholm modules over the quantum spheres and their K-theory pairings.

Three cocycles are built from the representations:

* ``tau0``: the circle average of the one-dimensional characters, a trace
  on every sphere;
* ``tau1``: the graded trace of the even module, ``Tr psi_+(a - sigma(a))``;
* ``phi``: the odd cocycle ``1/2 Tr(psi(a) [F, psi(b)])`` in the Fourier
  model, where F is the sign of the Fourier index.

All of them evaluate to exact rational functions of q. The generic cochain
operations (coboundary, cyclic permutation and the periodicity map) act on
:class:`CochainEvaluator` objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .ncalg import CyclicChain, MatNC, NCPoly, Presentation, chern_odd
from .qspheres import (
    FORMAL,
    SpherePresentation,
    _sphere_of,
    classical_point,
    idempotent_even,
    sigma_auto,
    sphere_algebra,
    unit_class,
    unitary_odd,
)
from .representations import (
    ShiftRep,
    build_rep,
    diagonal_expansion,
    geometric_trace,
    trace_exact,
)
from .scalars import QLaurent, QRatFunc


class DegreeMismatch(ValueError):
    pass


class NonIntegerPairing(ArithmeticError):
    """A pairing that should be an integer is not; this signals a bug."""


class WrongParity(ValueError):
    pass


# ---------------------------------------------------------------------------
# Cochains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CochainEvaluator:
    """A multilinear functional of ``degree + 1`` algebra elements."""

    degree: int
    evaluate: Callable[..., QRatFunc]
    tag: str = ""

    def __call__(self, *args: NCPoly) -> QRatFunc:
        if len(args) != self.degree + 1:
            raise DegreeMismatch(f"{self.tag or 'cochain'} of degree {self.degree} takes {self.degree + 1} arguments, got {len(args)}")
        return QRatFunc.lift(self.evaluate(*args))


def _multilinear(alg: Presentation, word_fn: Callable[..., QRatFunc]) -> Callable[..., QRatFunc]:
    """Extend a function of words to polynomials, term by term."""

    def evaluate(*polys: NCPoly) -> QRatFunc:
        for p in polys:
            if p.alg is not alg:
                raise ValueError(f"argument lives in {p.alg.name}, expected {alg.name}")
        total = QRatFunc(0)
        for combo in itertools.product(*(p.terms.items() for p in polys)):
            coeff = QLaurent.const(1)
            for _, c in combo:
                coeff = coeff * c
            value = word_fn(*(w for w, _ in combo))
            if value:
                total = total + value * QRatFunc(coeff)
        return total

    return evaluate


def zero_cochain(degree: int) -> CochainEvaluator:
    return CochainEvaluator(degree, lambda *args: QRatFunc(0), "0")


def cochain_b(phi: CochainEvaluator) -> CochainEvaluator:
    """Hochschild coboundary, raising the degree by one."""
    n = phi.degree

    def evaluate(*a: NCPoly) -> QRatFunc:
        total = QRatFunc(0)
        for j in range(n + 1):
            args = a[:j] + (a[j] * a[j + 1],) + a[j + 2 :]
            term = phi(*args)
            total = total + term if j % 2 == 0 else total - term
        last = phi(a[n + 1] * a[0], *a[1 : n + 1])
        return total + last if (n + 1) % 2 == 0 else total - last

    return CochainEvaluator(n + 1, evaluate, f"b({phi.tag})")


def cyclic_rotation(phi: CochainEvaluator) -> CochainEvaluator:
    """``(lambda phi)(a_0, ..., a_n) = (-1)^n phi(a_n, a_0, ..., a_{n-1})``."""
    n = phi.degree

    def evaluate(*a: NCPoly) -> QRatFunc:
        value = phi(a[n], *a[:n])
        return -value if n % 2 else value

    return CochainEvaluator(n, evaluate, f"lambda({phi.tag})")


def cyclicity_check(phi: CochainEvaluator, samples: Iterable[Sequence[NCPoly]]) -> bool:
    rotated = cyclic_rotation(phi)
    return all(phi(*s) == rotated(*s) for s in samples)


def vanishes_on(phi: CochainEvaluator, samples: Iterable[Sequence[NCPoly]]) -> bool:
    return all(not phi(*s) for s in samples)


def periodicity_S(phi: CochainEvaluator) -> CochainEvaluator:
    """The periodicity map from degree ``n - 1`` to degree ``n + 1``.

    With ``n = phi.degree + 1``, ``S phi(a_0, ..., a_{n+1})`` is minus
    ``1/(n(n+1))`` times the sum of the triple-product contractions
    ``a_{j-1} a_j a_{j+1}`` (j = 1..n) plus the signed double contractions
    ``a_{i-1} a_i`` and ``a_j a_{j+1}`` (1 <= i < j <= n).
    """
    n = phi.degree + 1
    factor = QRatFunc(Fraction(-1, n * (n + 1)))

    def evaluate(*a: NCPoly) -> QRatFunc:
        total = QRatFunc(0)
        for j in range(1, n + 1):
            args = a[: j - 1] + (a[j - 1] * a[j] * a[j + 1],) + a[j + 2 :]
            total = total + phi(*args)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                args = a[: i - 1] + (a[i - 1] * a[i],) + a[i + 1 : j] + (a[j] * a[j + 1],) + a[j + 2 :]
                term = phi(*args)
                total = total + term if (i + j) % 2 == 0 else total - term
        return factor * total

    return CochainEvaluator(n + 1, evaluate, f"S({phi.tag})")


# ---------------------------------------------------------------------------
# The trivial class: tau0
# ---------------------------------------------------------------------------


def tau0(a: NCPoly) -> QRatFunc:
    """Average over the circle of the characters ``x_top -> lambda``."""
    graded = classical_point(_sphere_of(a), FORMAL)(a)
    return QRatFunc(graded.get(0, QLaurent()))


def tau0_cochain(sphere: SpherePresentation) -> CochainEvaluator:
    def evaluate(a: NCPoly) -> QRatFunc:
        if a.alg is not sphere.alg:
            raise ValueError("element of a different algebra")
        return tau0(a)

    return CochainEvaluator(0, evaluate, "tau0")


# ---------------------------------------------------------------------------
# The even module: tau1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvenModule:
    """``psi_+ (+) psi_-`` with grading diag(1, -1) and F the swap."""

    n: int
    plus: ShiftRep
    minus: ShiftRep

    @staticmethod
    def build(n: int) -> "EvenModule":
        return EvenModule(n, build_rep("even_plus", n), build_rep("even_minus", n))


@lru_cache(maxsize=None)
def even_module(n: int) -> EvenModule:
    return EvenModule.build(n)


def tau1(a: NCPoly) -> QRatFunc:
    """``Tr psi_+(a) - Tr psi_-(a)``, computed as ``Tr psi_+(a - sigma(a))``."""
    sp = _sphere_of(a)
    if not sp.even:
        raise WrongParity("tau1 is defined on even spheres")
    return trace_exact(even_module(sp.n).plus, a - sigma_auto(a))


def tau1_cochain(sphere: SpherePresentation) -> CochainEvaluator:
    if not sphere.even:
        raise WrongParity("tau1 is defined on even spheres")
    return CochainEvaluator(0, tau1, "tau1")


def integral_even(a: NCPoly) -> QRatFunc:
    return tau1(a)


# ---------------------------------------------------------------------------
# The odd module: phi
# ---------------------------------------------------------------------------


def chi(m: int) -> int:
    return 1 if m > 0 else -1


@dataclass(frozen=True)
class BandTerm:
    """One word of ``[F, psi(b)]``: ``coeff * band_factor * psi(word)`` restricted
    to Fourier indices in ``band``."""

    word: tuple
    coeff: object
    band: tuple
    band_factor: int


@dataclass(frozen=True)
class BandOperator:
    rep: ShiftRep
    terms: tuple

    def support(self) -> set:
        return {k for t in self.terms for k in t.band}

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class OddModule:
    n: int
    rep: ShiftRep

    @staticmethod
    def build(n: int) -> "OddModule":
        return OddModule(n, build_rep("odd_fourier", n))


@lru_cache(maxsize=None)
def odd_module(n: int) -> OddModule:
    return OddModule.build(n)


def _odd_sphere(p: NCPoly) -> SpherePresentation:
    sp = _sphere_of(p)
    if sp.even:
        raise WrongParity("the odd module lives on odd spheres")
    return sp


def commutator_F(b: NCPoly) -> BandOperator:
    """``[F, psi(b)]`` in the Fourier model.

    A word shifting the Fourier index by ``s`` picks up
    ``chi(k_0 + s) - chi(k_0)``, which is ``2 sign(s)`` on ``|s|``
    consecutive values of ``k_0`` and zero elsewhere.
    """
    sp = _odd_sphere(b)
    rep = odd_module(sp.n - 1).rep
    terms = []
    for w, c in b.terms.items():
        shift, _, _ = rep.word_action(w)
        s = shift[0]
        if s == 0:
            continue
        band = tuple(range(1 - s, 1)) if s > 0 else tuple(range(1, 1 - s))
        terms.append(BandTerm(w, c, band, 2 if s > 0 else -2))
    return BandOperator(rep, tuple(terms))


_PHI_CACHE: dict = {}


def _phi_words(rep: ShiftRep, wa: tuple, wb: tuple) -> QRatFunc:
    key = (rep.n, wa, wb)
    if key not in _PHI_CACHE:
        _PHI_CACHE[key] = _phi_words_uncached(rep, wa, wb)
    return _PHI_CACHE[key]


def _phi_words_uncached(rep: ShiftRep, wa: tuple, wb: tuple) -> QRatFunc:
    shift_b, _, _ = rep.word_action(wb)
    s = shift_b[0]
    if s == 0:
        return QRatFunc(0)
    expansion = diagonal_expansion(rep, NCPoly._from_normal(rep.alg, {wa + wb: rep.alg.one}))
    if not expansion:
        return QRatFunc(0)
    # weights do not depend on the Fourier index, so the band of |s| values
    # with factor 2 sign(s), halved, contributes s times the lattice sum
    graded = geometric_trace(expansion, range(1, rep.lattice.arity))
    return graded.get(0, QRatFunc(0)) * QRatFunc(s)


def phi(a: NCPoly, b: NCPoly) -> QRatFunc:
    """``1/2 Tr(psi(a) [F, psi(b)])`` in the odd module."""
    sp = _odd_sphere(a)
    if b.alg is not a.alg:
        raise ValueError("arguments live in different algebras")
    rep = odd_module(sp.n - 1).rep
    return _multilinear(sp.alg, lambda wa, wb: _phi_words(rep, wa, wb))(a, b)


def trace_a_commutator(a: NCPoly, b: NCPoly) -> QRatFunc:
    """``Tr(psi(a) [F, psi(b)])``, twice :func:`phi`."""
    return phi(a, b) * QRatFunc(2)


def phi_cochain(sphere: SpherePresentation) -> CochainEvaluator:
    if sphere.even:
        raise WrongParity("the odd module lives on odd spheres")
    return CochainEvaluator(1, phi, "phi")


def integral_odd(a: NCPoly, b: NCPoly) -> QRatFunc:
    """``integral of a db``, defined as ``phi(a, b)``."""
    return phi(a, b)


# ---------------------------------------------------------------------------
# Pairings
# ---------------------------------------------------------------------------


def pair(cocycle: CochainEvaluator, chain: CyclicChain) -> QRatFunc:
    """Evaluate a cocycle on a chain, term by term."""
    if chain.degree != cocycle.degree:
        raise DegreeMismatch(f"cocycle of degree {cocycle.degree} against a chain of degree {chain.degree}")
    alg = chain.alg
    total = QRatFunc(0)
    for key, c in chain.terms.items():
        args = [NCPoly._from_normal(alg, {w: alg.one}) for w in key]
        value = cocycle(*args)
        if value:
            total = total + value * QRatFunc(c)
    return total


def pair_idempotent(cocycle: CochainEvaluator, e: MatNC) -> QRatFunc:
    """Degree-0 pairing, evaluated on ``tr(e)``."""
    if cocycle.degree != 0:
        raise DegreeMismatch("idempotents pair with degree-0 cocycles here")
    return cocycle(e.trace())


def pair_unitary(cocycle: CochainEvaluator, u: MatNC) -> QRatFunc:
    """Degree-1 pairing with ``ch_{1/2}(u)``."""
    if cocycle.degree != 1:
        raise DegreeMismatch("unitaries pair with degree-1 cocycles here")
    return pair(cocycle, chern_odd(u, 0))


def _as_integer(value: QRatFunc, what: str) -> int:
    if not value.is_constant():
        raise NonIntegerPairing(f"{what} depends on q: {value}")
    c = Fraction(value.constant_value())
    if c.denominator != 1:
        raise NonIntegerPairing(f"{what} is not an integer: {c}")
    return int(c)


def pairing_matrix(n: int) -> list[list[int]]:
    """Rows: the trivial class (tau0) and the even module (tau1).
    Columns: the unit class and the idempotent ``e_(2n)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    sp = sphere_algebra(2 * n + 1)
    classes = [unit_class(2 * n + 1).matrix, idempotent_even(n).matrix]
    cocycles = [tau0_cochain(sp), tau1_cochain(sp)]
    return [
        [_as_integer(pair_idempotent(c, m), f"pairing ({i}, {j})") for j, m in enumerate(classes)]
        for i, c in enumerate(cocycles)
    ]


def determinant(m: Sequence[Sequence[int]]) -> int:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def odd_pairing(n: int) -> int:
    """``<mu_odd, V_(2n+1)>``."""
    v = unitary_odd(n)
    return _as_integer(pair_unitary(phi_cochain(v.sphere), v.matrix), "odd pairing")
