"""Quantum Euclidean spheres S_q^{N-1} and their K-theory generators.

For ``N = 2n+1`` the algebra is generated by a self-adjoint ``x0`` together
with ``x1..xn`` and their adjoints; for ``N = 2n`` there is no ``x0``. The
relations are

* ``x_i x_j = q x_j x_i`` and ``x_i* x_j = q x_j x_i*`` for ``i < j``
  (together with their adjoints),
* ``[x_i, x_i*] = (1 - q^-2) s_{i-1}`` where ``s_0 = x0^2`` (or 0 without x0)
  and ``s_i = s_{i-1} + x_i* x_i``,
* ``s_n = 1``.

Normal words are ``x0^a (x1')^b1 x1^c1 ... (xn')^b xn^c`` with
``min(b, c) = 0`` at the top index.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .ncalg import Generator, MatNC, NCPoly, Presentation, mat_check
from .scalars import GaussRational, I, QLaurent, q_derivative_at_1

Q = QLaurent.monomial(1)
QINV = QLaurent.monomial(-1)
ONE_MINUS_Q2 = QLaurent({0: 1, -2: -1})


class WrongAlgebra(ValueError):
    pass


class NotUnitModulus(ValueError):
    pass


class FormalPhase:
    """Marker for a formal unit-modulus parameter.

    Maps that depend on a phase return a dictionary ``{m: value}`` holding the
    coefficient of ``lambda^m`` when called with this marker.
    """

    def __repr__(self):
        return "FORMAL"


FORMAL = FormalPhase()


@dataclass(frozen=True)
class SpherePresentation:
    N: int
    n: int
    even: bool
    alg: Presentation
    s: tuple
    inverted: bool = False

    @property
    def name(self) -> str:
        return self.alg.name

    @property
    def dimension(self) -> int:
        return self.N - 1

    def x(self, i: int) -> NCPoly:
        return self.alg.element(f"x{i}")

    def xs(self, i: int) -> NCPoly:
        return self.alg.element("x0" if i == 0 else f"x{i}'")

    def generator_polys(self) -> list[NCPoly]:
        return [NCPoly._from_normal(self.alg, {(g,): self.alg.one}) for g in range(len(self.alg.generators))]

    def parse(self, text: str) -> NCPoly:
        from .expr import parse_expression

        return parse_expression(text, self.alg)


_SPHERES: dict = {}


def sphere_algebra(N: int, *, inverted: bool = False) -> SpherePresentation:
    """The presentation of S_q^{N-1}.

    With ``inverted=True`` the relations are written for the parameter
    ``1/q`` (every q in the relations replaced by its inverse).
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    key = (N, inverted)
    if key in _SPHERES:
        return _SPHERES[key]
    even = N % 2 == 1
    n = N // 2
    qq = QINV if inverted else Q
    qinv = Q if inverted else QINV
    comm = QLaurent({0: 1, 2: -1}) if inverted else ONE_MINUS_Q2

    gens = []
    if even:
        gens.append(Generator(0, False, "x0", self_adjoint=True))
    for i in range(1, n + 1):
        gens.append(Generator(i, True, f"x{i}"))
        gens.append(Generator(i, False, f"x{i}"))
    suffix = "^-1" if inverted else ""
    name = f"Sq{N - 1}" + (f"(q{suffix})" if inverted else "")
    alg = Presentation(name, gens, QLaurent, source="quantum Euclidean sphere relations")
    gid = alg.gen
    one = QLaurent.const(1)

    def xg(i):
        return gid(f"x{i}")

    def xsg(i):
        return gid("x0") if i == 0 else gid(f"x{i}'")

    lower = list(range(0 if even else 1, n + 1))
    # commutation of distinct indices i < j
    for j in range(1, n + 1):
        for i in lower:
            if i >= j:
                continue
            # x_j x_i = q^-1 x_i x_j ; x_j x_i* = q^-1 x_i* x_j
            alg.add_rule((xg(j), xg(i)), {(xg(i), xg(j)): qinv})
            alg.add_rule((xg(j), xsg(i)), {(xsg(i), xg(j)): qinv})
            # x_j* x_i = q x_i x_j* ; x_j* x_i* = q x_i* x_j*
            alg.add_rule((xsg(j), xg(i)), {(xg(i), xsg(j)): qq})
            if i != 0:
                alg.add_rule((xsg(j), xsg(i)), {(xsg(i), xsg(j)): qq})

    def s_terms(i: int) -> dict:
        terms: dict = {}
        if even:
            terms[(xg(0), xg(0))] = one
        for k in range(1, i + 1):
            terms[(xsg(k), xg(k))] = one
        return terms

    for i in range(1, n):
        rhs = {(xsg(i), xg(i)): one}
        for w, c in s_terms(i - 1).items():
            rhs[w] = rhs.get(w, 0) + c * comm
        alg.add_rule((xg(i), xsg(i)), rhs)
    # top index: the sphere relation
    top_low = {(): one}
    for w, c in s_terms(n - 1).items():
        top_low[w] = -c
    alg.add_rule((xsg(n), xg(n)), top_low)
    top_high = {(): one}
    q2 = qinv * qinv
    for w, c in s_terms(n - 1).items():
        top_high[w] = -c * q2
    alg.add_rule((xg(n), xsg(n)), top_high)
    alg.freeze()

    s = []
    acc = alg.poly({(xg(0), xg(0)): one}) if even else alg.scalar(0)
    s.append(acc)
    for i in range(1, n + 1):
        acc = acc + alg.poly({(xsg(i), xg(i)): one})
        s.append(acc)
    sp = SpherePresentation(N, n, even, alg, tuple(s), inverted)
    _SPHERES[key] = sp
    return sp


def sphere_by_name(name: str) -> SpherePresentation:
    """Look up ``Sq2`` ... ``Sq7`` (or any ``Sq<d>``)."""
    if not name.startswith("Sq") or not name[2:].isdigit():
        raise KeyError(name)
    d = int(name[2:])
    if d < 1:
        raise KeyError(name)
    return sphere_algebra(d + 1)


# ---------------------------------------------------------------------------
# K-theory generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KTheoryElement:
    kind: str
    matrix: MatNC
    sphere: SpherePresentation

    def check(self):
        return mat_check(self.matrix, {"unit": "idempotent"}.get(self.kind, self.kind))


def _scalar_block(alg: Presentation, p: NCPoly, r: int) -> MatNC:
    zero = alg.scalar(0)
    return MatNC(alg, [[p if i == j else zero for j in range(r)] for i in range(r)])


def unipotent(N: int) -> MatNC:
    """``u_(2n)`` over S_q^{2n} (N odd) or its x0 = 0 specialisation (N even)."""
    sp = sphere_algebra(N)
    alg = sp.alg
    u = MatNC(alg, [[sp.x(0) if sp.even else alg.scalar(0)]])
    for k in range(1, sp.n + 1):
        r = u.size
        u = MatNC.blocks(
            alg,
            u.scale(QINV),
            _scalar_block(alg, sp.x(k), r),
            _scalar_block(alg, sp.xs(k), r),
            -u,
        )
    return u


def idempotent_even(n: int) -> KTheoryElement:
    if n < 1:
        raise ValueError("n must be at least 1")
    sp = sphere_algebra(2 * n + 1)
    u = unipotent(2 * n + 1)
    e = (MatNC.identity(sp.alg, u.size) + u).scale(Fraction(1, 2))
    return KTheoryElement("idempotent", e, sp)


def unitary_odd(n: int) -> KTheoryElement:
    if n < 0:
        raise ValueError("n must be non-negative")
    sp = sphere_algebra(2 * n + 2)
    alg = sp.alg
    v = MatNC(alg, [[sp.x(1)]])
    for k in range(1, n + 1):
        r = v.size
        v = MatNC.blocks(
            alg,
            _scalar_block(alg, sp.x(k + 1), r),
            v.scale(QINV),
            -v.star(),
            _scalar_block(alg, sp.xs(k + 1), r),
        )
    return KTheoryElement("unitary", v, sp)


def unit_class(N: int) -> KTheoryElement:
    sp = sphere_algebra(N)
    return KTheoryElement("unit", MatNC.identity(sp.alg, 1), sp)


# ---------------------------------------------------------------------------
# Automorphisms and structure maps
# ---------------------------------------------------------------------------


def _sphere_of(p: NCPoly) -> SpherePresentation:
    for sp in _SPHERES.values():
        if sp.alg is p.alg:
            return sp
    raise WrongAlgebra(f"{p.alg.name} is not a sphere algebra")


def sigma_auto(p: NCPoly) -> NCPoly:
    """The automorphism ``x0 -> -x0`` of an even sphere."""
    sp = _sphere_of(p)
    if not sp.even:
        raise WrongAlgebra("sigma is defined on even spheres only")
    x0 = sp.alg.gen("x0")
    return NCPoly._from_normal(
        p.alg, {w: (-c if w.count(x0) % 2 else c) for w, c in p.terms.items()}
    )


def _phase_power(lam: GaussRational, m: int) -> GaussRational:
    base = lam if m >= 0 else lam.conjugate()
    out = GaussRational(1)
    for _ in range(abs(m)):
        out = out * base
    return out


def _check_unit(lam) -> GaussRational:
    lam = GaussRational.lift(lam)
    if lam.norm() != 1:
        raise NotUnitModulus(f"{lam} does not lie on the unit circle")
    return lam


def t_action(p: NCPoly, phase):
    """Circle action ``x1 -> lambda x1`` on an odd sphere.

    With a Gaussian-rational phase the image is an element of the same
    algebra; with :data:`FORMAL` the result is ``{m: component}`` where the
    component of degree m picks up ``lambda^m``.
    """
    sp = _sphere_of(p)
    if sp.even:
        raise WrongAlgebra("the circle action is defined on odd spheres")
    x1, x1s = sp.alg.gen("x1"), sp.alg.gen("x1'")
    graded: dict[int, dict] = {}
    for w, c in p.terms.items():
        m = w.count(x1) - w.count(x1s)
        graded.setdefault(m, {})[w] = c
    if isinstance(phase, FormalPhase):
        return {m: NCPoly._from_normal(p.alg, t) for m, t in graded.items()}
    lam = _check_unit(phase)
    out: dict = {}
    for m, terms in graded.items():
        f = _phase_power(lam, m)
        for w, c in terms.items():
            out[w] = c * f
    return NCPoly._from_normal(p.alg, {w: c for w, c in out.items() if c})


def _images_equator(src: SpherePresentation, tgt: SpherePresentation) -> list[NCPoly]:
    out = []
    for g in src.alg.generators:
        if g.index == 0:
            out.append(tgt.alg.scalar(0))
        else:
            out.append(tgt.alg.element(g.display))
    return out


def _images_suspend(src: SpherePresentation, tgt: SpherePresentation) -> list[NCPoly]:
    out = []
    for g in src.alg.generators:
        if g.index == 1:
            out.append(tgt.x(0))
        else:
            name = f"x{g.index - 1}" + ("'" if g.starred else "")
            out.append(tgt.alg.element(name))
    return out


def _images_inversion(src: SpherePresentation, tgt: SpherePresentation) -> list[NCPoly]:
    n = src.n
    minus_q_inv = QLaurent({-1: -1})
    out = []
    for g in src.alg.generators:
        if g.index == 0:
            out.append(tgt.x(0).scale(minus_q_inv**n))
        else:
            scale = minus_q_inv ** (n - g.index)
            image = tgt.x(g.index) if g.starred else tgt.xs(g.index)
            out.append(image.scale(scale))
    return out


def structure_target(p_or_sphere, kind: str) -> SpherePresentation:
    sp = p_or_sphere if isinstance(p_or_sphere, SpherePresentation) else _sphere_of(p_or_sphere)
    if kind == "equator":
        if not sp.even or sp.inverted:
            raise WrongAlgebra("equator maps an even sphere onto the odd sphere below it")
        return sphere_algebra(sp.N - 1)
    if kind == "suspend_even_in_odd":
        if sp.even or sp.inverted or sp.N < 4:
            raise WrongAlgebra("suspension maps S_q^{2n+1} (n >= 1) onto S_q^{2n}")
        return sphere_algebra(sp.N - 1)
    if kind == "inversion_iso":
        if not sp.inverted:
            raise WrongAlgebra("the inversion map starts from the sphere at parameter 1/q")
        return sphere_algebra(sp.N)
    raise ValueError(f"unknown structure map {kind!r}")


def structure_map(p: NCPoly, kind: str) -> NCPoly:
    """Apply ``equator``, ``suspend_even_in_odd`` or ``inversion_iso``.

    ``inversion_iso`` starts from an element of ``sphere_algebra(N,
    inverted=True)`` (relations at parameter 1/q) and lands in
    ``sphere_algebra(N)``; it sends ``x0 -> (-q)^-n x0`` and
    ``x_i -> (-q)^-(n-i) x_i*``.
    """
    src = _sphere_of(p)
    tgt = structure_target(src, kind)
    images = {
        "equator": _images_equator,
        "suspend_even_in_odd": _images_suspend,
        "inversion_iso": _images_inversion,
    }[kind](src, tgt)
    return p.substitute(tgt.alg, images)


def map_matrix(m: MatNC, kind: str) -> MatNC:
    tgt = structure_target(_sphere_of(m.rows[0][0]), kind)
    return m.map_entries(lambda x: structure_map(x, kind), tgt.alg)


def relation_images(src: SpherePresentation, kind: str) -> list[tuple[str, NCPoly]]:
    """Images of every defining relation ``lhs - rhs`` of ``src`` under a structure map.

    The relation is mapped word by word before any reduction in the source,
    so a zero image means the relation holds in the target.
    """
    tgt = structure_target(src, kind)
    images = {
        "equator": _images_equator,
        "suspend_even_in_odd": _images_suspend,
        "inversion_iso": _images_inversion,
    }[kind](src, tgt)

    def image_of(word):
        term = tgt.alg.scalar(1)
        for g in word:
            term = term * images[g]
        return term

    out = []
    for lhs, rhs in src.alg.rules.items():
        value = image_of(lhs)
        for w, c in rhs:
            value = value - image_of(w).scale(c)
        out.append((src.alg.word_text(lhs), value))
    return out


# ---------------------------------------------------------------------------
# Classical points
# ---------------------------------------------------------------------------


def classical_point(sphere: SpherePresentation, phase) -> Callable[[NCPoly], object]:
    """The character ``x_n -> lambda`` killing every lower generator.

    Returns a function on algebra elements. For a Gaussian-rational phase the
    value is a QLaurent; for :data:`FORMAL` it is ``{m: QLaurent}`` keyed by
    the power of lambda.
    """
    formal = isinstance(phase, FormalPhase)
    lam = None if formal else _check_unit(phase)
    top, top_s = sphere.alg.gen(f"x{sphere.n}"), sphere.alg.gen(f"x{sphere.n}'")

    def character(p: NCPoly):
        if p.alg is not sphere.alg:
            raise WrongAlgebra("element of a different algebra")
        graded: dict[int, QLaurent] = {}
        for w, c in p.terms.items():
            if any(g not in (top, top_s) for g in w):
                continue
            m = w.count(top) - w.count(top_s)
            graded[m] = graded.get(m, QLaurent()) + c
        graded = {m: v for m, v in graded.items() if v}
        if formal:
            return graded
        total = QLaurent()
        for m, v in graded.items():
            total = total + v * _phase_power(lam, m)
        return total

    return character


# ---------------------------------------------------------------------------
# Poisson bracket
# ---------------------------------------------------------------------------


class ClassicalPoly:
    """A commutative polynomial on the classical sphere.

    Monomials are stored as exponent vectors indexed by generator id; they
    correspond one-to-one with normal words of the quantum algebra.
    """

    __slots__ = ("alg", "terms")

    def __init__(self, alg: Presentation, terms: Mapping[tuple, GaussRational]):
        self.alg = alg
        self.terms = {k: GaussRational.lift(v) for k, v in terms.items() if v}

    @classmethod
    def from_word_terms(cls, alg: Presentation, terms: Mapping[tuple, object]) -> "ClassicalPoly":
        acc: dict = {}
        for w, c in terms.items():
            key = _exponents(alg, w)
            acc[key] = acc.get(key, GaussRational(0)) + GaussRational.lift(c)
        return cls(alg, acc)

    @classmethod
    def from_ncpoly_at_one(cls, p: NCPoly) -> "ClassicalPoly":
        return cls.from_word_terms(p.alg, {w: c.at_one() for w, c in p.terms.items()})

    def lift(self) -> NCPoly:
        alg = self.alg
        terms = {}
        for key, c in self.terms.items():
            w = tuple(g for g in sorted(range(len(key)), key=lambda i: alg.ranks[i]) for _ in range(key[g]))
            terms[w] = QLaurent.const(c)
        return NCPoly.from_raw(alg, terms)

    def __add__(self, other: "ClassicalPoly") -> "ClassicalPoly":
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, GaussRational(0)) + v
        return ClassicalPoly(self.alg, acc)

    def __neg__(self):
        return ClassicalPoly(self.alg, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "ClassicalPoly") -> "ClassicalPoly":
        return ClassicalPoly.from_ncpoly_at_one(self.lift() * other.lift())

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, ClassicalPoly) and self.alg is other.alg and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def text(self) -> str:
        if not self.terms:
            return "0"
        alg = self.alg
        parts = []
        for key, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                alg.generators[g].display + (f"^{e}" if e > 1 else "")
                for g, e in enumerate(key)
                if e
            )
            coeff = str(c)
            parts.append(coeff if not mono else (mono if coeff == "1" else f"{coeff}*{mono}"))
        return " + ".join(parts)

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"ClassicalPoly({self.text()})"


def _exponents(alg: Presentation, w) -> tuple:
    counts = [0] * len(alg.generators)
    for g in w:
        counts[g] += 1
    return tuple(counts)


def _as_quantum(x) -> NCPoly:
    return x.lift() if isinstance(x, ClassicalPoly) else x


def poisson_bracket(f, g) -> ClassicalPoly:
    """``{f, g} = -i d/dq at q=1 of (f g - g f)``, as a classical polynomial."""
    f, g = _as_quantum(f), _as_quantum(g)
    comm = f * g - g * f
    terms = {}
    for w, c in comm.terms.items():
        d = q_derivative_at_1(c)
        if d:
            terms[w] = -I * d
    return ClassicalPoly.from_word_terms(f.alg, terms)
