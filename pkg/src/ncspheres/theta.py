"""Theta-deformations: tori, planes and spheres, Clifford algebras, twists.

Every algebra here is graded by Z^n: ``z_j`` (or ``u_j``, ``G_j``) has
degree ``e_j`` and its adjoint ``-e_j``. Homogeneous elements of degrees
``a`` and ``b`` commute up to the bicharacter

    chi(a, b) = prod_{j<k} L_jk^(a_j b_k - a_k b_j)

with ``L_jk = exp(2 pi i theta_jk)``. The commutative deformations use
``ab = chi(a, b) ba``; the Clifford algebra uses the anticommuting form with
the inverse bicharacter, which is what makes the Clifford-valued projection
square to itself. Coefficients live in :class:`Phase`, so every identity is
checked for all values of the deformation parameters at once.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .ncalg import Generator, MatNC, NCPoly, Presentation
from .scalars import Phase


class ModelVerificationFailed(RuntimeError):
    """A Clifford matrix model violates one of the defining relations."""


HALF = Fraction(1, 2)


def phase_scalars() -> Presentation:
    """The field of phase polynomials viewed as an algebra with no generators."""
    global _SCALARS
    if _SCALARS is None:
        _SCALARS = Presentation("C[L]", [], Phase, source="phase scalars").freeze()
    return _SCALARS


_SCALARS: Presentation | None = None


def bicharacter(a: Sequence[int], b: Sequence[int], exponent=1) -> Phase:
    """``chi(a, b)^exponent``; indices of the phases start at 1."""
    out = Phase.const(1)
    for j, k in itertools.combinations(range(len(a)), 2):
        e = (a[j] * b[k] - a[k] * b[j]) * exponent
        if e:
            out = out * Phase.lam(j + 1, k + 1, e)
    return out


@dataclass(frozen=True)
class ThetaPresentation:
    name: str
    n: int
    kind: str  # plane, sphere, torus, clifford
    alg: Presentation
    degrees: tuple  # Z^n degree of each generator id
    even: bool = False
    reading: str = "car"

    def element(self, display: str) -> NCPoly:
        return self.alg.element(display)

    def parse(self, text: str) -> NCPoly:
        from .expr import parse_expression

        return parse_expression(text, self.alg)

    def z(self, j: int) -> NCPoly:
        return self.alg.element(self._names[0].format(j))

    def zs(self, j: int) -> NCPoly:
        return self.alg.element(self._names[0].format(j) + "'")

    @property
    def _names(self):
        return _NAMES[self.name]


_NAMES: dict = {}
_CACHE: dict = {}


def _unit(n: int, j: int, sign: int = 1) -> tuple:
    return tuple(sign if i == j - 1 else 0 for i in range(n))


def _add_graded_rules(alg: Presentation, degrees, *, anti: bool = False, skip=()):
    """For every pair ``b a`` with ``rank(b) > rank(a)`` add ``b a -> c a b``."""
    k = len(alg.generators)
    for b in range(k):
        for a in range(k):
            if alg.ranks[b] <= alg.ranks[a] or (b, a) in skip:
                continue
            if anti:
                c = -bicharacter(degrees[b], degrees[a], -1)
            else:
                c = bicharacter(degrees[b], degrees[a])
            alg.add_rule((b, a), {(a, b): c})


def _theta_plane_like(n: int, *, with_x: bool, sphere: bool, names=None) -> ThetaPresentation:
    """Shared builder for theta planes and spheres.

    ``names`` overrides the generator names: a list of n names for the z's,
    optionally followed by the name of the central self-adjoint generator.
    """
    if n < 1:
        raise ValueError("need at least one complex generator")
    znames = list(names[:n]) if names else [f"z{j}" for j in range(1, n + 1)]
    xname = names[n] if names and len(names) > n else "x"
    gens = []
    degrees = []
    if with_x:
        gens.append(Generator(0, False, xname, self_adjoint=True))
        degrees.append((0,) * n)
    for j in range(1, n + 1):
        gens.append(Generator(j, True, znames[j - 1]))
        degrees.append(_unit(n, j, -1))
        gens.append(Generator(j, False, znames[j - 1]))
        degrees.append(_unit(n, j))
    if sphere:
        dim = 2 * n if with_x else 2 * n - 1
        name = f"Stheta{dim}"
    else:
        dim = 2 * n + 1 if with_x else 2 * n
        name = f"Rtheta{dim}"
    if names:
        name += "[" + ",".join(names) + "]"
    alg = Presentation(name, gens, Phase, source="theta-deformed relations")
    gid = alg.gen
    one = Phase.const(1)
    same = set()
    for j in range(1, n + 1):
        zj, zsj = gid(znames[j - 1]), gid(znames[j - 1] + "'")
        same.add((zj, zsj))
        same.add((zsj, zj))
    _add_graded_rules(alg, degrees, skip=same)
    top = n if sphere else None
    for j in range(1, n + 1):
        zj, zsj = gid(znames[j - 1]), gid(znames[j - 1] + "'")
        if j != top:
            alg.add_rule((zj, zsj), {(zsj, zj): one})
    if sphere:
        rhs = {(): one}
        if with_x:
            rhs[(gid(xname), gid(xname))] = -one
        for j in range(1, n):
            rhs[(gid(znames[j - 1] + "'"), gid(znames[j - 1]))] = -one
        zn, zsn = gid(znames[n - 1]), gid(znames[n - 1] + "'")
        alg.add_rule((zn, zsn), rhs)
        alg.add_rule((zsn, zn), rhs)
    alg.freeze()
    tp = ThetaPresentation(name, n, "sphere" if sphere else "plane", alg, tuple(degrees), even=with_x)
    _NAMES[name] = (znames[0][:-1] + "{}" if not names else "{}", xname)
    return tp


def theta_plane(n: int, *, odd_dimension: bool = False) -> ThetaPresentation:
    """The plane with generators z_j, z_j* and, with ``odd_dimension``, a
    central self-adjoint x."""
    key = ("plane", n, odd_dimension)
    if key not in _CACHE:
        _CACHE[key] = _theta_plane_like(n, with_x=odd_dimension, sphere=False)
    return _CACHE[key]


def theta_sphere(dim: int) -> ThetaPresentation:
    """``S_theta^dim``: for dim = 2n the generators are z_1..z_n and x with
    ``sum z_j z_j* + x^2 = 1``; for dim = 2n - 1 there is no x."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    key = ("sphere", dim)
    if key not in _CACHE:
        even = dim % 2 == 0
        n = dim // 2 if even else (dim + 1) // 2
        _CACHE[key] = _theta_plane_like(n, with_x=even, sphere=True)
    return _CACHE[key]


def s_theta4() -> ThetaPresentation:
    """The four-sphere with generators alpha, beta and the central z."""
    key = ("s4",)
    if key not in _CACHE:
        _CACHE[key] = _theta_plane_like(2, with_x=True, sphere=True, names=["alpha", "beta", "z"])
    return _CACHE[key]


def s_theta3() -> ThetaPresentation:
    key = ("s3",)
    if key not in _CACHE:
        _CACHE[key] = _theta_plane_like(2, with_x=False, sphere=True, names=["alpha", "beta"])
    return _CACHE[key]


def _q_block(tp: ThetaPresentation) -> list[list[NCPoly]]:
    a, b = tp.element("alpha"), tp.element("beta")
    lam = Phase.lam(1, 2)
    return [[a, b], [-(b.star().scale(lam)), a.star()]]


def s_theta4_projection() -> MatNC:
    """``e = 1/2 ((1+z) I_2, q; q*, (1-z) I_2)`` with ``q = (alpha, beta; -L12 beta*, alpha*)``."""
    tp = s_theta4()
    alg = tp.alg
    z = tp.element("z")
    one = alg.scalar(1)
    zero = alg.scalar(0)
    q = MatNC(alg, _q_block(tp))
    qs = q.star()
    top = MatNC(alg, [[one + z, zero], [zero, one + z]])
    bottom = MatNC(alg, [[one - z, zero], [zero, one - z]])
    return MatNC.blocks(alg, top, q, qs, bottom).scale(HALF)


def s_theta3_unitary() -> MatNC:
    """``q = (alpha, beta; -L12 beta*, alpha*)`` over the three-sphere."""
    tp = s_theta3()
    return MatNC(tp.alg, _q_block(tp))


# ---------------------------------------------------------------------------
# Tori and the Moyal product
# ---------------------------------------------------------------------------


def torus_algebra(n: int) -> ThetaPresentation:
    """Unitaries u_1..u_n with ``u_j u_k = L_jk u_k u_j``."""
    if n < 2:
        raise ValueError("the torus needs n >= 2")
    key = ("torus", n)
    if key in _CACHE:
        return _CACHE[key]
    gens, degrees = [], []
    for j in range(1, n + 1):
        gens.append(Generator(j, True, f"u{j}"))
        degrees.append(_unit(n, j, -1))
        gens.append(Generator(j, False, f"u{j}"))
        degrees.append(_unit(n, j))
    alg = Presentation(f"Ttheta{n}", gens, Phase, source="noncommutative torus")
    gid = alg.gen
    one = Phase.const(1)
    same = set()
    for j in range(1, n + 1):
        u, us = gid(f"u{j}"), gid(f"u{j}'")
        same |= {(u, us), (us, u)}
        alg.add_rule((u, us), {(): one})
        alg.add_rule((us, u), {(): one})
    _add_graded_rules(alg, degrees, skip=same)
    alg.freeze()
    tp = ThetaPresentation(alg.name, n, "torus", alg, tuple(degrees))
    _NAMES[alg.name] = ("u{}", None)
    _CACHE[key] = tp
    return tp


def rho(r: Sequence[int], s: Sequence[int]) -> Phase:
    """``rho(r, s) = prod_{j<k} L_jk^((r_j s_k - r_k s_j)/2)``."""
    return _rho(tuple(r), tuple(s))


@functools.lru_cache(maxsize=1 << 16)
def _rho(r: tuple, s: tuple) -> Phase:
    return bicharacter(r, s, HALF)


@dataclass(frozen=True)
class FourierFunction:
    """A finitely supported function on Z^n with phase-polynomial values."""

    n: int
    coeffs: Mapping  # tuple -> Phase

    @staticmethod
    def basis(r: Sequence[int], c=1) -> "FourierFunction":
        return FourierFunction(len(r), {tuple(r): Phase.lift(c)})

    def __add__(self, other: "FourierFunction") -> "FourierFunction":
        out = dict(self.coeffs)
        for r, c in other.coeffs.items():
            out[r] = out.get(r, Phase.const(0)) + c
        return FourierFunction(self.n, {r: c for r, c in out.items() if c})

    def __eq__(self, other):
        if not isinstance(other, FourierFunction):
            return NotImplemented
        a = {r: c for r, c in self.coeffs.items() if c}
        b = {r: c for r, c in other.coeffs.items() if c}
        return self.n == other.n and a == b

    def __hash__(self):
        return hash((self.n, frozenset((r, c) for r, c in self.coeffs.items() if c)))


def moyal_star(f: FourierFunction, g: FourierFunction) -> FourierFunction:
    """``(f * g)_t = sum_{r+s=t} rho(r, s) f_r g_s``."""
    if f.n != g.n:
        raise ValueError("functions on tori of different dimension")
    out: dict = {}
    for r, a in f.coeffs.items():
        for s, b in g.coeffs.items():
            t = tuple(x + y for x, y in zip(r, s))
            term = rho(r, s) * a * b
            out[t] = out[t] + term if t in out else term
    return FourierFunction(f.n, {t: c for t, c in out.items() if c})


def weyl_monomial(tp: ThetaPresentation, r: Sequence[int]) -> NCPoly:
    """``u^r = prod_{j<k} L_jk^(-r_j r_k / 2) u_1^r_1 ... u_n^r_n``.

    The prefactor is summed over j < k only; the symmetric sum over all
    pairs would vanish for an antisymmetric theta.
    """
    alg = tp.alg
    word = []
    for j, rj in enumerate(r, start=1):
        g = alg.gen(f"u{j}" if rj > 0 else f"u{j}'")
        word.extend([g] * abs(rj))
    pref = Phase.const(1)
    for j, k in itertools.combinations(range(len(r)), 2):
        if r[j] * r[k]:
            pref = pref * Phase.lam(j + 1, k + 1, Fraction(-r[j] * r[k], 2))
    return NCPoly.from_raw(alg, {tuple(word): pref})


def lattice_ball(n: int, bound: int) -> list[tuple]:
    """All r in Z^n with ``|r_1| + ... + |r_n| <= bound``."""
    return [r for r in itertools.product(range(-bound, bound + 1), repeat=n) if sum(map(abs, r)) <= bound]


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def moyal_associativity_check(n: int, bound: int) -> CheckReport:
    report = CheckReport(f"moyal associativity n={n} |r|<={bound}")
    ball = lattice_ball(n, bound)
    e = {r: FourierFunction.basis(r) for r in ball}
    for r, s in itertools.product(ball, repeat=2):
        rs = moyal_star(e[r], e[s])
        for t in ball:
            report.checked += 1
            if moyal_star(rs, e[t]) != moyal_star(e[r], moyal_star(e[s], e[t])):
                report.failures.append((r, s, t))
    return report


def moyal_torus_iso_check(n: int, bound: int) -> CheckReport:
    """``e_r -> u^r`` intertwines the Moyal product with the torus product."""
    tp = torus_algebra(n)
    report = CheckReport(f"moyal/torus n={n} |r|<={bound}")
    ball = lattice_ball(n, bound)
    mono = {r: weyl_monomial(tp, r) for r in ball}
    for r, s in itertools.product(ball, repeat=2):
        report.checked += 1
        t = tuple(x + y for x, y in zip(r, s))
        lhs = mono[r] * mono[s]
        prod = moyal_star(FourierFunction.basis(r), FourierFunction.basis(s))
        rhs = weyl_monomial(tp, t).scale(prod.coeffs[t])
        if lhs != rhs:
            report.failures.append((r, s))
    return report


# ---------------------------------------------------------------------------
# Clifford algebras
# ---------------------------------------------------------------------------


def clifford_algebra(n: int, reading: str = "car") -> ThetaPresentation:
    """Generators G_j, G_j* (j = 1..n).

    ``reading="car"`` (default): ``G_j G_k + L^kj G_k G_j = 0``, the same for
    the adjoints, and ``G_j G_k* + L^jk G_k* G_j = delta_jk``.
    ``reading="printed"``: the last relation as ``G_j G_k* + L^jk G_k G_j* =
    delta_jk``, which forces ``G_j G_j* = 1/2``; it is kept for comparison
    and is not expected to be confluent.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if reading not in ("car", "printed"):
        raise ValueError(f"unknown reading {reading!r}")
    key = ("cliff", n, reading)
    if key in _CACHE:
        return _CACHE[key]
    gens, degrees = [], []
    for j in range(1, n + 1):
        gens.append(Generator(j, True, f"G{j}"))
        degrees.append(_unit(n, j, -1))
        gens.append(Generator(j, False, f"G{j}"))
        degrees.append(_unit(n, j))
    suffix = "" if reading == "car" else "(printed)"
    alg = Presentation(f"Cliff{n}{suffix}", gens, Phase, source="lambda-Clifford relations")
    gid = alg.gen
    one = Phase.const(1)
    if reading == "car":
        same = set()
        for j in range(1, n + 1):
            g, gs = gid(f"G{j}"), gid(f"G{j}'")
            same |= {(g, gs), (gs, g)}
            alg.add_rule((g, g), {})
            alg.add_rule((gs, gs), {})
            alg.add_rule((g, gs), {(): one, (gs, g): -one})
        _add_graded_rules(alg, degrees, anti=True, skip=same)
    else:
        for j in range(1, n + 1):
            g, gs = gid(f"G{j}"), gid(f"G{j}'")
            alg.add_rule((g, g), {})
            alg.add_rule((gs, gs), {})
            alg.add_rule((g, gs), {(): Phase.const(HALF)})
            for k in range(1, j):
                gk, gks = gid(f"G{k}"), gid(f"G{k}'")
                alg.add_rule((g, gk), {(gk, g): -Phase.lam(k, j)})
                alg.add_rule((gs, gks), {(gks, gs): -Phase.lam(k, j)})
                alg.add_rule((g, gks), {(gk, gs): -Phase.lam(j, k)})
    alg.freeze()
    tp = ThetaPresentation(alg.name, n, "clifford", alg, tuple(degrees), reading=reading)
    _NAMES[alg.name] = ("G{}", None)
    _CACHE[key] = tp
    return tp


def chirality(cl: ThetaPresentation) -> NCPoly:
    """``gamma = [G_1*, G_1] ... [G_n*, G_n]``."""
    alg = cl.alg
    out = alg.scalar(1)
    for j in range(1, cl.n + 1):
        g, gs = alg.element(f"G{j}"), alg.element(f"G{j}'")
        out = out * gs.commutator(g)
    return out


def chirality_checks(cl: ThetaPresentation) -> dict[str, bool]:
    gamma = chirality(cl)
    alg = cl.alg
    out = {"self_adjoint": gamma.star() == gamma, "square_one": gamma * gamma == alg.scalar(1)}
    for j in range(1, cl.n + 1):
        for name in (f"G{j}", f"G{j}'"):
            g = alg.element(name)
            out[f"anticommutes_{name}"] = (gamma * g + g * gamma).is_zero()
    return out


def _kron(a: list[list[Phase]], b: list[list[Phase]]) -> list[list[Phase]]:
    zero = Phase.const(0)
    ra, rb = len(a), len(b)
    out = [[zero] * (ra * rb) for _ in range(ra * rb)]
    for i, j in itertools.product(range(ra), repeat=2):
        if not a[i][j]:
            continue
        for k, l in itertools.product(range(rb), repeat=2):
            if b[k][l]:
                out[i * rb + k][j * rb + l] = a[i][j] * b[k][l]
    return out


@dataclass
class CliffordModel:
    """Matrices for G_j, G_j* and gamma, plus the off-diagonal blocks.

    ``gamma`` is diagonal with entries ±1 in the natural tensor basis;
    ``block_perm`` reorders the basis so that gamma becomes diag(I, -I), and
    ``sigma[j]`` / ``sigma_bar[j]`` are the upper-right blocks of G_j and
    G_j* in that order.
    """

    n: int
    alg: Presentation
    gammas: list
    gammas_star: list
    gamma: MatNC
    block_perm: list
    sigma: list
    sigma_bar: list

    def in_block_form(self, m: MatNC) -> MatNC:
        return m.permute(self.block_perm)


def _to_mat(alg: Presentation, rows) -> MatNC:
    return MatNC(alg, [[alg.scalar(c) for c in row] for row in rows])


def _upper_right(m: MatNC) -> MatNC:
    h = m.size // 2
    return MatNC(m.alg, [[m.rows[i][h + j] for j in range(h)] for i in range(h)])


def clifford_matrices(n: int, alg: Presentation | None = None) -> CliffordModel:
    """Twisted Jordan-Wigner model of size 2^n, verified against the relations.

    ``G_j = D ⊗ ... ⊗ D ⊗ a ⊗ 1 ⊗ ... ⊗ 1`` with ``a = (0, 1; 0, 0)`` in slot j
    and ``diag(1, -L^jk)`` in each earlier slot k.
    """
    if not 1 <= n <= 3:
        raise ValueError("matrix models are provided for 1 <= n <= 3")
    alg = alg or phase_scalars()
    one, zero = Phase.const(1), Phase.const(0)
    ident = [[one, zero], [zero, one]]
    a = [[zero, one], [zero, zero]]
    gammas = []
    for j in range(1, n + 1):
        m = [[one]]
        for k in range(1, n + 1):
            if k < j:
                factor = [[one, zero], [zero, -Phase.lam(j, k)]]
            elif k == j:
                factor = a
            else:
                factor = ident
            m = _kron(m, factor)
        gammas.append(_to_mat(alg, m))
    gammas_star = [g.star() for g in gammas]
    gamma = MatNC.identity(alg, 2**n)
    for g, gs in zip(gammas, gammas_star):
        gamma = gamma * (gs * g - g * gs)
    diag = [gamma.rows[i][i].constant_term() for i in range(2**n)]
    perm = [i for i in range(2**n) if diag[i] == 1] + [i for i in range(2**n) if diag[i] != 1]
    model = CliffordModel(
        n,
        alg,
        gammas,
        gammas_star,
        gamma,
        perm,
        [_upper_right(g.permute(perm)) for g in gammas],
        [_upper_right(g.permute(perm)) for g in gammas_star],
    )
    failures = verify_clifford_model(model)
    if failures:
        raise ModelVerificationFailed("; ".join(failures))
    return model


def verify_clifford_model(model: CliffordModel) -> list[str]:
    """Check every CAR-reading relation, the chirality identities and the block form."""
    alg, n = model.alg, model.n
    size = 2**n
    ident, zero = MatNC.identity(alg, size), MatNC.zero(alg, size)
    G, Gs = model.gammas, model.gammas_star
    bad = []
    for j in range(n):
        for k in range(n):
            lam_kj = Phase.lam(k + 1, j + 1)
            lam_jk = Phase.lam(j + 1, k + 1)
            if G[j] * G[k] + (G[k] * G[j]).scale(lam_kj) != zero:
                bad.append(f"G{j+1} G{k+1}")
            if Gs[j] * Gs[k] + (Gs[k] * Gs[j]).scale(lam_kj) != zero:
                bad.append(f"G{j+1}* G{k+1}*")
            target = ident if j == k else zero
            if G[j] * Gs[k] + (Gs[k] * G[j]).scale(lam_jk) != target:
                bad.append(f"G{j+1} G{k+1}*")
    gamma = model.gamma
    if gamma * gamma != ident:
        bad.append("gamma^2")
    if gamma.star() != gamma:
        bad.append("gamma*")
    for j in range(n):
        if gamma * G[j] + G[j] * gamma != zero:
            bad.append(f"gamma G{j+1}")
    g_block = gamma.permute(model.block_perm)
    h = size // 2
    expected = MatNC(alg, [[alg.scalar((1 if i < h else -1) if i == k else 0) for k in range(size)] for i in range(size)])
    if g_block != expected:
        bad.append("block form of gamma")
    return bad


def theta_projection(n: int) -> MatNC:
    """``e = 1/2 (I + sum_j (G_j* z_j + G_j z_j*) + gamma x)`` over S_theta^2n,
    written in the basis where gamma = diag(I, -I)."""
    tp = theta_sphere(2 * n)
    alg = tp.alg
    model = clifford_matrices(n, alg)
    size = 2**n
    total = MatNC.identity(alg, size)
    for j in range(1, n + 1):
        total = total + model.gammas_star[j - 1].map_entries(lambda c, z=tp.z(j): c * z)
        total = total + model.gammas[j - 1].map_entries(lambda c, z=tp.zs(j): c * z)
    x = alg.element("x")
    total = total + model.gamma.map_entries(lambda c: c * x)
    return model.in_block_form(total).scale(HALF)


def theta_unitary(n: int) -> MatNC:
    """``u = sum_j (sigma_bar_j z_j + sigma_j z_j*)`` over S_theta^(2n-1).

    It is the upper-right block of the projection, restricted to x = 0.
    """
    tp = theta_sphere(2 * n - 1)
    alg = tp.alg
    model = clifford_matrices(n, alg)
    size = 2 ** (n - 1)
    u = MatNC.zero(alg, size)
    for j in range(1, n + 1):
        u = u + model.sigma_bar[j - 1].map_entries(lambda c, z=tp.z(j): c * z)
        u = u + model.sigma[j - 1].map_entries(lambda c, z=tp.zs(j): c * z)
    return u


# ---------------------------------------------------------------------------
# Bigraded symbols and twists
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Atom:
    """An abstract homogeneous operator.

    ``bidegree`` is that of the underlying operator; the effective degree is
    negated once for J-conjugation and once for taking the adjoint.
    """

    name: str
    bidegree: tuple
    jconj: bool = False
    starred: bool = False

    @property
    def degree(self) -> tuple:
        s = -1 if self.jconj != self.starred else 1
        return (s * self.bidegree[0], s * self.bidegree[1])

    def j_conjugated(self) -> "Atom":
        return Atom(self.name, self.bidegree, not self.jconj, self.starred)

    def adjoint(self) -> "Atom":
        return Atom(self.name, self.bidegree, self.jconj, not self.starred)

    def text(self) -> str:
        body = self.name + ("*" if self.starred else "")
        return f"J{body}J^-1" if self.jconj else body


# quadratic exponent a p1^2 + b p1 p2 + c p2^2 + d p1 + e p2
Quad = tuple

ZERO_Q: Quad = (0, 0, 0, 0, 0)


def _q(a=0, b=0, c=0, d=0, e=0) -> Quad:
    return tuple(Fraction(x) if not isinstance(x, int) else x for x in (a, b, c, d, e))


def _q_add(x: Quad, y: Quad) -> Quad:
    return tuple(u + v for u, v in zip(x, y))


def _q_shift(q: Quad, m: tuple) -> tuple[Quad, object]:
    """``Q(p + m)`` split into its p-dependent part and its constant."""
    a, b, c, d, e = q
    m1, m2 = m
    new = (a, b, c, d + 2 * a * m1 + b * m2, e + b * m1 + 2 * c * m2)
    const = a * m1 * m1 + b * m1 * m2 + c * m2 * m2 + d * m1 + e * m2
    return new, const


def _q_jflip(q: Quad) -> Quad:
    """``-Q(-p)``: the exponent after moving lambda^Q(p) through J."""
    a, b, c, d, e = q
    return (-a, -b, -c, d, e)


def _lam(k) -> Phase:
    return Phase.lam(1, 2, k)


@dataclass(frozen=True)
class BigradedSymbol:
    """A finite sum of ``coeff * J^e * atoms * lambda^Q(p)``.

    ``terms`` maps ``(e, atoms, Q)`` to a coefficient in the phase ring
    (powers of ``L12``). Normal form moves every power of lambda to the right
    using ``lambda^Q(p) x = x lambda^Q(p + deg x)``, every scalar to the left
    (conjugating it across J), and every J to the left
    (``x J = J (J x J^-1)``, ``lambda^Q(p) J = J lambda^-Q(-p)``).
    """

    terms: Mapping

    @staticmethod
    def scalar(c) -> "BigradedSymbol":
        c = Phase.lift(c)
        return BigradedSymbol({(0, (), ZERO_Q): c} if c else {})

    @staticmethod
    def atom(name: str, n1: int, n2: int) -> "BigradedSymbol":
        return BigradedSymbol({(0, (Atom(name, (n1, n2)),), ZERO_Q): Phase.const(1)})

    @staticmethod
    def of_atom(a: Atom) -> "BigradedSymbol":
        return BigradedSymbol({(0, (a,), ZERO_Q): Phase.const(1)})

    @staticmethod
    def lam(a=0, b=0, c=0, d=0, e=0, const=0) -> "BigradedSymbol":
        """``lambda^(a p1^2 + b p1 p2 + c p2^2 + d p1 + e p2 + const)``."""
        return BigradedSymbol({(0, (), _q(a, b, c, d, e)): _lam(const)})

    @staticmethod
    def J(power: int = 1) -> "BigradedSymbol":
        return BigradedSymbol({(power, (), ZERO_Q): Phase.const(1)})

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: "BigradedSymbol") -> "BigradedSymbol":
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return BigradedSymbol(out)

    def __neg__(self) -> "BigradedSymbol":
        return BigradedSymbol({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "BigradedSymbol") -> "BigradedSymbol":
        return self + (-other)

    def __mul__(self, other: "BigradedSymbol") -> "BigradedSymbol":
        if not isinstance(other, BigradedSymbol):
            other = BigradedSymbol.scalar(other)
        out: dict = {}
        for t1, c1 in self.terms.items():
            for (e2, w2, q2), c2 in other.terms.items():
                e, w, q = t1
                c = c1
                # scalar c2 moves left across J^e
                c = c * (c2 if e % 2 == 0 else c2.conj())
                # J^e2: conjugate the atoms and flip the exponent when odd
                if e2:
                    if e2 % 2:
                        w = tuple(a.j_conjugated() for a in w)
                        q = _q_jflip(q)
                    e = e + e2
                for a in w2:
                    q, const = _q_shift(q, a.degree)
                    if const:
                        c = c * _lam(const if e % 2 == 0 else -const)
                    w = w + (a,)
                q = _q_add(q, q2)
                key = (e, w, q)
                s = out.get(key)
                s = c if s is None else s + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return BigradedSymbol(out)

    def star(self) -> "BigradedSymbol":
        """Adjoint of a J-free symbol: reverse the atoms, negate Q, conjugate."""
        out = BigradedSymbol.scalar(0)
        for (e, w, q), c in self.terms.items():
            if e:
                raise ValueError("adjoints are only taken of J-free symbols")
            term = BigradedSymbol({(0, (), tuple(-x for x in q)): Phase.const(1)})
            for a in reversed(w):
                term = term * BigradedSymbol.of_atom(a.adjoint())
            out = out + term * BigradedSymbol.scalar(c.conj())
        return out

    def homogeneous_terms(self):
        for (e, w, q), c in self.terms.items():
            deg = (sum(a.degree[0] for a in w), sum(a.degree[1] for a in w))
            yield deg, BigradedSymbol({(e, w, q): c})

    def normalized(self, commuting: Iterable = ()) -> "BigradedSymbol":
        """Sort adjacent atoms declared to commute (pairs of :class:`Atom`)."""
        pairs = {frozenset(p) for p in commuting}
        if not pairs:
            return self
        out = BigradedSymbol.scalar(0)
        for (e, w, q), c in self.terms.items():
            w = list(w)
            changed = True
            while changed:
                changed = False
                for i in range(len(w) - 1):
                    if w[i] > w[i + 1] and frozenset((w[i], w[i + 1])) in pairs:
                        w[i], w[i + 1] = w[i + 1], w[i]
                        changed = True
            out = out + BigradedSymbol({(e, tuple(w), q): c})
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (e, w, q), c in sorted(self.terms.items(), key=repr):
            bits = [f"({c})"]
            if e:
                bits.append("J" if e == 1 else f"J^{e}")
            bits.extend(a.text() for a in w)
            names = ("p1^2", "p1*p2", "p2^2", "p1", "p2")
            expo = " + ".join(f"{x}*{nm}" for x, nm in zip(q, names) if x)
            if expo:
                bits.append(f"lambda^({expo})")
            parts.append("*".join(bits))
        return " + ".join(parts)


def symbols_equal(a: BigradedSymbol, b: BigradedSymbol, commuting: Iterable = ()) -> bool:
    return (a - b).normalized(commuting).is_zero()


def twist_left(x: BigradedSymbol) -> BigradedSymbol:
    """``l(T) = sum T_n lambda^(n2 p1)``."""
    out = BigradedSymbol.scalar(0)
    for (n1, n2), t in x.homogeneous_terms():
        out = out + t * BigradedSymbol.lam(d=n2)
    return out


def twist_right(x: BigradedSymbol) -> BigradedSymbol:
    """``r(T) = sum lambda^(n1 p2) T_n``."""
    out = BigradedSymbol.scalar(0)
    for (n1, n2), t in x.homogeneous_terms():
        out = out + BigradedSymbol.lam(e=n1) * t
    return out


def star_product(x: BigradedSymbol, y: BigradedSymbol) -> BigradedSymbol:
    """``x * y = lambda^(n1' n2) x y`` for x of bidegree n and y of n'."""
    out = BigradedSymbol.scalar(0)
    for (n1, n2), s in x.homogeneous_terms():
        for (m1, m2), t in y.homogeneous_terms():
            out = out + (s * t) * BigradedSymbol.scalar(_lam(m1 * n2))
    return out


def jtwist() -> BigradedSymbol:
    """``J~ = J lambda^(-p1 p2)``."""
    return BigradedSymbol.J() * BigradedSymbol.lam(b=-1)


def jtwist_inverse() -> BigradedSymbol:
    return BigradedSymbol.lam(b=1) * BigradedSymbol.J(-1)


def j_conjugate(x: BigradedSymbol) -> BigradedSymbol:
    return BigradedSymbol.J() * x * BigradedSymbol.J(-1)


def jtwist_conjugate(x: BigradedSymbol) -> BigradedSymbol:
    return jtwist() * x * jtwist_inverse()


# the individual identities ---------------------------------------------------


def left_twist_is_multiplicative(n: tuple, m: tuple) -> bool:
    x, y = BigradedSymbol.atom("x", *n), BigradedSymbol.atom("y", *m)
    return symbols_equal(twist_left(x) * twist_left(y), twist_left(star_product(x, y)))


def twisted_commutator_formula(n: tuple, m: tuple) -> bool:
    x, y = BigradedSymbol.atom("x", *n), BigradedSymbol.atom("y", *m)
    lhs = twist_left(x) * twist_right(y) - twist_right(y) * twist_left(x)
    rhs = (x * y - y * x) * BigradedSymbol.lam(d=n[1], e=m[0], const=m[0] * (n[1] + m[1]))
    return symbols_equal(lhs, rhs)


def twists_commute_for_commuting_atoms(n: tuple, m: tuple) -> bool:
    x, y = BigradedSymbol.atom("x", *n), BigradedSymbol.atom("y", *m)
    comm = twist_left(x) * twist_right(y) - twist_right(y) * twist_left(x)
    pair = [(Atom("x", n), Atom("y", m))]
    return comm.normalized(pair).is_zero()


def jtwist_exchanges_twists(n: tuple) -> bool:
    x = BigradedSymbol.atom("x", *n)
    return symbols_equal(jtwist_conjugate(twist_left(x)), twist_right(j_conjugate(x)))


def jtwist_squares_to_j_squared() -> bool:
    return symbols_equal(jtwist() * jtwist(), BigradedSymbol.J(2))


def lambda_pp_moves_past_atom(n: tuple) -> bool:
    n1, n2 = n
    x = BigradedSymbol.atom("x", *n)
    lhs = BigradedSymbol.lam(b=-1) * x
    rhs = x * BigradedSymbol.lam(const=-n1 * n2) * BigradedSymbol.lam(d=-n2, e=-n1) * BigradedSymbol.lam(b=-1)
    return symbols_equal(lhs, rhs)


def jtwist_times_left_twist(n: tuple) -> bool:
    n1, n2 = n
    x = BigradedSymbol.atom("x", *n)
    lhs = jtwist() * twist_left(x)
    rhs = BigradedSymbol.J() * x * BigradedSymbol.lam(const=-n1 * n2) * BigradedSymbol.lam(e=-n1) * BigradedSymbol.lam(b=-1)
    return symbols_equal(lhs, rhs)


def right_twist_times_jtwist(n: tuple) -> bool:
    n1, n2 = n
    x = BigradedSymbol.atom("x", *n)
    lhs = twist_right(j_conjugate(x)) * jtwist()
    rhs = BigradedSymbol.J() * x * BigradedSymbol.lam(e=-n1, const=-n1 * n2) * BigradedSymbol.lam(b=-1)
    return symbols_equal(lhs, rhs)


def opposite_commutes_with_left_twist(n: tuple, m: tuple) -> bool:
    """``[l(x), J~ l(y)* J~^-1] = 0`` when x commutes with ``J y* J^-1``."""
    x, y = BigradedSymbol.atom("x", *n), BigradedSymbol.atom("y", *m)
    y0 = jtwist_conjugate(twist_left(y).star())
    comm = twist_left(x) * y0 - y0 * twist_left(x)
    pair = [(Atom("x", n), Atom("y", m, jconj=True, starred=True))]
    return comm.normalized(pair).is_zero()


def twist_lemma_report(bound: int = 3) -> CheckReport:
    """All identities for every bidegree pair with entries in [-bound, bound]."""
    report = CheckReport(f"twist lemmas |n_i|<={bound}")
    rng = range(-bound, bound + 1)
    degs = list(itertools.product(rng, repeat=2))
    report.checked += 1
    if not jtwist_squares_to_j_squared():
        report.failures.append(("J~^2 = J^2",))
    for n in degs:
        for name, fn in (("J~ l(x) J~^-1 = r(JxJ^-1)", jtwist_exchanges_twists), ("lambda^-p1p2 x", lambda_pp_moves_past_atom), ("J~ l(x)", jtwist_times_left_twist), ("r(JxJ^-1) J~", right_twist_times_jtwist)):
            report.checked += 1
            if not fn(n):
                report.failures.append((name, n))
        for m in degs:
            for name, fn in (("l(x)l(y) = l(x*y)", left_twist_is_multiplicative), ("[l(x), r(y)] formula", twisted_commutator_formula), ("[l(x), r(y)] = 0", twists_commute_for_commuting_atoms), ("[x, y0] = 0", opposite_commutes_with_left_twist)):
                report.checked += 1
                if not fn(n, m):
                    report.failures.append((name, n, m))
    return report


def s_theta4_generator_images() -> list[NCPoly]:
    """Images of alpha, beta, z (and adjoints) in S_theta^4 = theta_sphere(4).

    ``alpha -> z1``, ``beta -> -L12 z2``, ``z -> x``.
    """
    src, tgt = s_theta4(), theta_sphere(4)
    lam = Phase.lam(1, 2)
    base = {"alpha": tgt.z(1), "beta": tgt.z(2).scale(-lam), "z": tgt.element("x")}
    images = []
    for g in src.alg.generators:
        p = base[g.name]
        images.append(p.star() if g.starred else p)
    return images


def theta_projection_matches_s_theta4() -> bool:
    """theta_projection(2), with its first two basis vectors swapped, equals
    the image of the S_theta^4 projection under the generator matching."""
    tgt = theta_sphere(4).alg
    images = s_theta4_generator_images()
    mapped = s_theta4_projection().map_entries(lambda p: p.substitute(tgt, images), tgt)
    return mapped == theta_projection(2).permute([1, 0, 2, 3])
