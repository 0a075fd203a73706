import itertools
import random
from fractions import Fraction

import pytest

from ncspheres.ncalg import MatNC, chern_even, chern_odd, confluence_probe, hochschild_b, mat_check
from ncspheres.scalars import Phase
from ncspheres.theta import (
    Atom,
    BigradedSymbol,
    FourierFunction,
    ModelVerificationFailed,
    bicharacter,
    chirality_checks,
    clifford_algebra,
    clifford_matrices,
    j_conjugate,
    jtwist,
    jtwist_conjugate,
    jtwist_exchanges_twists,
    lattice_ball,
    left_twist_is_multiplicative,
    moyal_associativity_check,
    moyal_star,
    moyal_torus_iso_check,
    opposite_commutes_with_left_twist,
    rho,
    s_theta3,
    s_theta3_unitary,
    s_theta4,
    s_theta4_projection,
    star_product,
    symbols_equal,
    theta_projection,
    theta_projection_matches_s_theta4,
    theta_sphere,
    theta_unitary,
    torus_algebra,
    twist_left,
    twist_right,
    twisted_commutator_formula,
    twists_commute_for_commuting_atoms,
    verify_clifford_model,
    weyl_monomial,
)

L12 = Phase.lam(1, 2)
HALF = Fraction(1, 2)


# tori and the Moyal product ----------------------------------------------------------------


def test_torus_relations():
    tp = torus_algebra(2)
    u1, u2 = tp.z(1), tp.z(2)
    assert u1 * u2 == (u2 * u1).scale(L12)
    assert u1 * tp.zs(1) == tp.alg.scalar(1)
    assert tp.zs(1) * u1 == tp.alg.scalar(1)
    assert tp.parse("u2*u1*u2'") == u1.scale(L12.inverse())
    with pytest.raises(ValueError):
        torus_algebra(1)


def test_torus_probe():
    assert confluence_probe(torus_algebra(3).alg, trials=300, seed=2).ok


def test_rho_examples():
    assert rho((1, 0), (0, 1)) == Phase.lam(1, 2, HALF)
    for r in lattice_ball(3, 2):
        assert rho(r, r) == Phase.const(1)
        assert rho(r, tuple(-x for x in r)) == Phase.const(1)


def test_rho_is_a_bicharacter_squared_root():
    rng = random.Random(0)
    for _ in range(50):
        r = tuple(rng.randint(-3, 3) for _ in range(3))
        s = tuple(rng.randint(-3, 3) for _ in range(3))
        assert rho(r, s) * rho(r, s) == bicharacter(r, s)
        assert rho(r, s) * rho(s, r) == Phase.const(1)


def test_moyal_basis_products():
    e = FourierFunction.basis
    assert moyal_star(e((1, 0)), e((0, 1))) == e((1, 1), Phase.lam(1, 2, HALF))
    assert moyal_star(e((2, -1)), e((-2, 1))) == e((0, 0))


def test_moyal_cocycle_identity():
    ball = lattice_ball(2, 2)
    for r, s, t in itertools.product(ball, repeat=3):
        rs = tuple(a + b for a, b in zip(r, s))
        st = tuple(a + b for a, b in zip(s, t))
        assert rho(r, s) * rho(rs, t) == rho(s, t) * rho(r, st)


def test_moyal_associativity_small():
    report = moyal_associativity_check(2, 2)
    assert report.ok and report.checked == len(lattice_ball(2, 2)) ** 3


def test_moyal_product_is_bilinear():
    e = FourierFunction.basis
    f = e((1, 0)) + e((0, 2), L12)
    g = e((0, 1)) + e((-1, 1), Phase.const(3))
    expanded = moyal_star(e((1, 0)), g) + moyal_star(e((0, 2), L12), g)
    assert moyal_star(f, g) == expanded


def test_weyl_monomials_match_the_torus():
    tp = torus_algebra(2)
    lhs = weyl_monomial(tp, (1, 0)) * weyl_monomial(tp, (0, 1))
    assert lhs == weyl_monomial(tp, (1, 1)).scale(Phase.lam(1, 2, HALF))
    assert weyl_monomial(tp, (2, 1)) * weyl_monomial(tp, (-2, -1)) == tp.alg.scalar(1)
    assert moyal_torus_iso_check(2, 3).ok
    assert moyal_torus_iso_check(3, 2).ok


# spheres ----------------------------------------------------------------------------------


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_theta_sphere_probe_and_sphere_relation(dim):
    tp = theta_sphere(dim)
    s = tp.element("x") * tp.element("x") if dim % 2 == 0 else tp.alg.scalar(0)
    for j in range(1, tp.n + 1):
        s = s + tp.z(j) * tp.zs(j)
    assert s == tp.alg.scalar(1)
    assert confluence_probe(tp.alg, trials=300, seed=dim).ok


def test_theta_sphere_commutation_phases():
    tp = theta_sphere(4)
    z1, z2 = tp.z(1), tp.z(2)
    assert z2 * z1 == (z1 * z2).scale(bicharacter((0, 1), (1, 0)))


def test_s_theta4_projection_and_chern_characters():
    e = s_theta4_projection()
    assert mat_check(e, "idempotent").ok
    assert mat_check(e, "self_adjoint").ok
    tp = s_theta4()
    assert e.trace() == tp.alg.scalar(2)
    assert chern_even(e, 0).is_zero()
    assert chern_even(e, 1).is_zero()
    ch2 = chern_even(e, 2)
    assert not ch2.is_zero()
    assert hochschild_b(ch2).is_zero()


def test_s_theta3_unitary():
    q = s_theta3_unitary()
    assert mat_check(q, "unitary").ok
    assert chern_odd(q, 0).is_zero()
    tp = s_theta3()
    a, b = tp.element("alpha"), tp.element("beta")
    assert a * b == (b * a).scale(L12)


def test_theta_projection_matches_the_four_sphere():
    assert theta_projection_matches_s_theta4()


# Clifford algebras ------------------------------------------------------------------------


def test_clifford_one_generator_model():
    model = clifford_matrices(1)
    alg = model.alg
    one, zero = alg.scalar(1), alg.scalar(0)
    g = model.gammas[0]
    assert g == MatNC(alg, [[zero, one], [zero, zero]])
    assert g * g == MatNC.zero(alg, 2)
    assert model.gamma == MatNC(alg, [[-one, zero], [zero, one]])
    assert model.gamma * g + g * model.gamma == MatNC.zero(alg, 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_clifford_models_verify(n):
    model = clifford_matrices(n)
    assert verify_clifford_model(model) == []
    assert model.gamma.size == 2**n
    assert len(model.sigma) == n and model.sigma[0].size == 2 ** (n - 1)


def test_broken_clifford_model_is_reported():
    model = clifford_matrices(2)
    model.gammas[1] = model.gammas[1].scale(2)
    assert verify_clifford_model(model)
    with pytest.raises(ValueError):
        clifford_matrices(4)
    assert issubclass(ModelVerificationFailed, RuntimeError)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_clifford_presentation(n):
    cl = clifford_algebra(n)
    assert confluence_probe(cl.alg, trials=300, seed=n).ok
    assert all(chirality_checks(cl).values())
    g1 = cl.alg.element("G1")
    assert (g1 * g1).is_zero()
    assert g1 * cl.alg.element("G1'") == cl.alg.scalar(1) - cl.alg.element("G1'") * g1


def test_printed_reading_is_available():
    cl = clifford_algebra(1, reading="printed")
    g, gs = cl.alg.element("G1"), cl.alg.element("G1'")
    assert g * gs == cl.alg.scalar(HALF)
    with pytest.raises(ValueError):
        clifford_algebra(1, reading="other")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_theta_projection_and_unitary(n):
    e = theta_projection(n)
    assert mat_check(e, "idempotent").ok
    assert mat_check(e, "self_adjoint").ok
    assert e.trace() == e.alg.scalar(2 ** (n - 1))
    for k in range(n):
        assert chern_even(e, k).is_zero()
    u = theta_unitary(n)
    assert mat_check(u, "unitary").ok
    for k in range(n - 1):
        assert chern_odd(u, k).is_zero()


def test_top_odd_character_is_nontrivial():
    u = theta_unitary(2)
    assert chern_odd(u, 0).is_zero()
    assert not chern_odd(u, 1).is_zero()


# bigraded symbols ---------------------------------------------------------------------------


def test_star_product_examples():
    x = BigradedSymbol.atom("x", 1, 0)
    y = BigradedSymbol.atom("y", 0, 1)
    assert symbols_equal(star_product(x, y), x * y)
    assert symbols_equal(twist_left(x) * twist_left(y), twist_left(x * y))
    # x of (0,1) and y of (1,0): one factor of lambda
    assert symbols_equal(star_product(y, x), (y * x) * BigradedSymbol.scalar(L12))


def test_lambda_moves_past_an_atom():
    x = BigradedSymbol.atom("x", 2, -1)
    lhs = BigradedSymbol.lam(d=1) * x
    rhs = x * BigradedSymbol.lam(d=1, const=2)
    assert symbols_equal(lhs, rhs)


def test_j_conjugation_flips_degrees():
    x = BigradedSymbol.atom("x", 1, 2)
    ((deg, _),) = list(j_conjugate(x).homogeneous_terms())
    assert deg == (-1, -2)
    assert symbols_equal(jtwist() * jtwist(), BigradedSymbol.J(2))


def test_degree_zero_conjugation():
    x = BigradedSymbol.atom("x", 0, 0)
    assert symbols_equal(jtwist_conjugate(x), j_conjugate(x))


@pytest.mark.parametrize("n,m", [((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 1), (-2, 1)), ((2, -1), (1, 3))])
def test_twist_identities(n, m):
    assert left_twist_is_multiplicative(n, m)
    assert twisted_commutator_formula(n, m)
    assert twists_commute_for_commuting_atoms(n, m)
    assert opposite_commutes_with_left_twist(n, m)
    assert jtwist_exchanges_twists(n)


def test_twisted_commutator_needs_the_commuting_declaration():
    x, y = BigradedSymbol.atom("x", 1, 1), BigradedSymbol.atom("y", 1, -1)
    comm = twist_left(x) * twist_right(y) - twist_right(y) * twist_left(x)
    assert not comm.is_zero()
    assert comm.normalized([(Atom("x", (1, 1)), Atom("y", (1, -1)))]).is_zero()


def test_normalizing_a_normal_symbol_changes_nothing():
    x = BigradedSymbol.atom("x", 1, 1)
    s = x * BigradedSymbol.lam(b=1) + BigradedSymbol.scalar(L12)
    assert s.normalized() == s
    pair = [(Atom("x", (1, 1)), Atom("y", (0, 1)))]
    assert s.normalized(pair).normalized(pair) == s.normalized(pair)


def test_symbol_products_are_associative():
    rng = random.Random(8)

    def random_symbol():
        out = BigradedSymbol.scalar(0)
        for _ in range(2):
            t = BigradedSymbol.atom(rng.choice("xyz"), rng.randint(-2, 2), rng.randint(-2, 2))
            t = t * BigradedSymbol.lam(*(rng.randint(-1, 1) for _ in range(5)))
            if rng.random() < 0.3:
                t = BigradedSymbol.J(rng.choice([1, -1])) * t
            out = out + t
        return out

    for _ in range(60):
        a, b, c = random_symbol(), random_symbol(), random_symbol()
        assert symbols_equal((a * b) * c, a * (b * c))


def test_star_reverses_products():
    x = BigradedSymbol.atom("x", 1, 0)
    y = BigradedSymbol.atom("y", 1, 2) * BigradedSymbol.lam(d=1)
    assert symbols_equal((x * y).star(), y.star() * x.star())
    with pytest.raises(ValueError):
        BigradedSymbol.J().star()
