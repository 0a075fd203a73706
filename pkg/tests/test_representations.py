import random
from fractions import Fraction

import numpy as np
import pytest

from ncspheres.ncalg import normal_form, random_word
from ncspheres.representations import (
    FAMILIES,
    MissingPhase,
    NotTraceClass,
    SpectralWeight,
    StateLattice,
    adjointness_check,
    adjointness_numeric,
    apply,
    build_rep,
    numeric_trace,
    relation_check,
    sigma_intertwining,
    spectrum_check,
    trace_exact,
    truncate,
)
from ncspheres.scalars import GaussRational, QLaurent, QRatFunc, evaluate_numeric

QI = QLaurent.monomial(-1)
PYTH = GaussRational(Fraction(3, 5), Fraction(4, 5))


def reps(n_even=(1, 2, 3), n_odd=(0, 1, 2)):
    for n in n_even:
        yield build_rep("even_plus", n)
        yield build_rep("even_minus", n)
    for n in n_odd:
        yield build_rep("odd_lambda", n, PYTH)
        yield build_rep("odd_fourier", n)


def value(weight, state, q=2.0, lam=1.0):
    return complex(weight.numeric(np.array([state]), q, lam)[0])


# actions ------------------------------------------------------------------------------


def test_even_plus_x1_lowers_with_root_weight():
    rep = build_rep("even_plus", 1)
    for k in range(1, 8):
        ((target, w),) = apply(rep, "x1", (k,))
        assert target == (k - 1,)
        assert abs(value(w, (k,)) - (1 - 2.0 ** (-2 * k)) ** 0.5) < 1e-15


def test_odd_lambda_x1_is_diagonal_with_phase():
    rep = build_rep("odd_lambda", 1, PYTH)
    lam = complex(0.6, 0.8)
    for k in range(6):
        ((target, w),) = apply(rep, "x1", (k,))
        assert target == (k,)
        assert abs(value(w, (k,), lam=lam) - lam * 2.0**-k) < 1e-15


def test_fourier_x1_shifts_the_fourier_index():
    rep = build_rep("odd_fourier", 2)
    state = (-3, 2, 5)
    ((target, w),) = apply(rep, "x1", state)
    assert target == (-2, 2, 5)
    assert abs(value(w, state) - 2.0 ** -(2 + 5)) < 1e-15


def test_annihilation_at_the_boundary():
    rep = build_rep("even_plus", 1)
    assert apply(rep, "x1", (0,)) == []
    assert apply(rep, "x1*x1'", (0,)) != []
    assert apply(rep, "x1'*x1", (0,)) == []


def test_x1_star_x1_is_diagonal_with_linear_weight():
    # x1 applied first lowers k, then x1* raises it back: (1 - q^-2k)
    rep = build_rep("even_plus", 1)
    ((target, w),) = apply(rep, "x1'*x1", (4,))
    assert target == (4,)
    assert w.is_perfect_square()
    # 1 - q^-2k, written in X = q^-k
    assert w.expand() == {(0,): QLaurent.const(1), (2,): QLaurent.const(-1)}
    for k in range(1, 10):
        ((_, w),) = apply(rep, "x1'*x1", (k,))
        assert abs(value(w, (k,)) - (1 - 2.0 ** (-2 * k))) < 1e-15


def test_fourier_x1_x1star_weight():
    for n in (1, 2, 3):
        rep = build_rep("odd_fourier", n)
        state = (7,) + tuple(range(1, n + 1))
        ((target, w),) = apply(rep, "x1*x1'", state)
        assert target == state
        assert abs(value(w, state) - 2.0 ** (-2 * sum(state[1:]))) < 1e-15


@pytest.mark.parametrize("family,n", [("even_plus", 2), ("even_minus", 3), ("odd_lambda", 2), ("odd_fourier", 2)])
def test_word_then_star_reverse_is_a_perfect_square(family, n):
    rep = build_rep(family, n, PYTH if family == "odd_lambda" else None)
    alg = rep.alg
    rng = random.Random(11)
    for _ in range(100):
        word = random_word(rng, alg, 5)
        back = tuple(alg.adjoint[g] for g in word)
        state = tuple(rng.randrange(0, 6) for _ in range(rep.lattice.arity))
        out = apply(rep, back + word, state)
        if not out:
            continue
        ((target, w),) = out
        assert target == state
        assert w.is_perfect_square()
        assert value(w, state, lam=complex(0.6, 0.8)).real >= 0


def test_state_outside_the_lattice_is_rejected():
    with pytest.raises(ValueError):
        apply(build_rep("even_plus", 1), "x1", (-1,))


def test_missing_phase_and_bad_family():
    with pytest.raises(MissingPhase):
        build_rep("odd_lambda", 1)
    with pytest.raises(MissingPhase):
        build_rep("odd_lambda", 1, "lambda")
    with pytest.raises(ValueError):
        build_rep("odd_lambda", 1, GaussRational(1, 1))
    with pytest.raises(ValueError):
        build_rep("even_sideways", 1)
    assert len(FAMILIES) == 4


# weights ------------------------------------------------------------------------------


def test_opposite_root_factors_cancel():
    a = SpectralWeight.make(1, (0,), 0, {(0, 1): 1})
    b = SpectralWeight.make(1, (0,), 0, {(0, 1): -1})
    assert (a * b).roots == ()


def test_squared_root_factor_expands_to_a_polynomial():
    w = SpectralWeight.make(1, (1,), 0, {(0, 0): 2})
    # q^-k (1 - q^-2k) = X - X^3
    assert w.expand() == {(1,): QLaurent.const(1), (3,): QLaurent.const(-1)}


def test_lattice_box():
    lat = StateLattice(2, (True, False))
    box = lat.box(3)
    assert len(box) == 5 * 3
    assert lat.contains((-4, 0)) and not lat.contains((0, -1))


# relations and adjoints -----------------------------------------------------------------


def test_relation_check_passes_for_every_family():
    for rep in reps():
        report = relation_check(rep, 2.0, 20 if rep.lattice.arity < 3 else 10, 1e-12)
        assert report.ok, (rep.family, rep.n, report.failures)
        assert report.checked_states > 0
        # with no indices there is no boundary to skip
        assert (report.skipped_states > 0) == (rep.lattice.arity > 0)


def test_relation_check_on_the_three_sphere_with_trivial_phase():
    rep = build_rep("odd_lambda", 1, 1)
    report = relation_check(rep, 2.0, 30, 1e-12)
    assert report.ok
    assert report.relations == len(rep.alg.rules)


def test_corrupted_weight_is_caught_with_a_witness():
    rep = build_rep("even_plus", 1)
    bad = rep.with_action("x1", (-1,), SpectralWeight.make(2, (0,), 0, {(0, 0): 1}))
    report = relation_check(bad, 2.0, 30, 1e-12)
    assert not report.ok
    relation, state, residual = report.failures[0]
    assert isinstance(state, tuple) and residual > 1e-12


def test_relation_check_preconditions():
    rep = build_rep("even_plus", 1)
    with pytest.raises(ValueError):
        relation_check(rep, 1.0)
    with pytest.raises(ValueError):
        relation_check(rep, 2.0, K=3)


def test_adjointness():
    for rep in reps():
        assert adjointness_check(rep) == []
        assert adjointness_numeric(rep, 2.0, 8) < 1e-12
    bad = build_rep("even_plus", 1).with_action("x1", (-1,), SpectralWeight.make(1, (1,), 0, {(0, 0): 1}))
    # the pair is compared in both directions, so both members are reported
    assert adjointness_check(bad) == ["x1", "x1'"]


def test_sigma_intertwines_the_even_families():
    for n in (1, 2, 3):
        assert sigma_intertwining(n)


def test_spectra_of_x_star_x_and_x_x_star_agree():
    rep = build_rep("even_plus", 2)
    for name in ("x1", "x2"):
        assert spectrum_check(rep, name)


# traces ----------------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trace_of_x0(n):
    rep = build_rep("even_plus", n)
    expected = QRatFunc(1, (1 - QI) ** n)
    assert trace_exact(rep, rep.sphere.x(0)) == expected
    minus = build_rep("even_minus", n)
    assert trace_exact(minus, minus.sphere.x(0)) == -expected


def test_trace_of_unit_diverges_and_off_diagonal_vanishes():
    rep = build_rep("even_plus", 1)
    with pytest.raises(NotTraceClass):
        trace_exact(rep, rep.alg.scalar(1))
    assert trace_exact(rep, rep.sphere.x(1)) == QRatFunc(0)


def test_trace_of_x0_cubed_numerically():
    rep = build_rep("even_plus", 1)
    cube = rep.sphere.x(0) ** 3
    exact = trace_exact(rep, cube)
    assert exact == QRatFunc(1, 1 - QI**3)
    assert abs(evaluate_numeric(exact, 2.0) - 8 / 7) < 1e-14
    op = truncate(rep, 2.0, 40)(cube)
    nt = numeric_trace(op)
    assert abs(nt.value - 8 / 7) <= nt.tail_bound + 1e-14


def test_numeric_trace_of_x0_with_tail_bound():
    rep = build_rep("even_plus", 1)
    nt = numeric_trace(truncate(rep, 2.0, 40)(rep.sphere.x(0)))
    assert abs(nt.value - 2.0) <= nt.tail_bound + 1e-15
    assert 0 < nt.tail_bound <= 2.0**-38
    off = numeric_trace(truncate(rep, 2.0, 7)(rep.sphere.x(1)))
    assert off.value == 0


def test_odd_lambda_trace_carries_the_phase():
    rep = build_rep("odd_lambda", 1, "formal")
    x1 = rep.sphere.x(1)
    graded = trace_exact(rep, x1)
    assert set(graded) == {1}
    assert graded[1] == QRatFunc(1, 1 - QI)
    concrete = build_rep("odd_lambda", 1, -1)
    assert trace_exact(concrete, concrete.sphere.x(1)) == QRatFunc(-1, 1 - QI)


def test_fourier_diagonal_operators_are_not_trace_class():
    rep = build_rep("odd_fourier", 1)
    with pytest.raises(NotTraceClass):
        trace_exact(rep, rep.sphere.x(1) * rep.sphere.xs(1))
    assert trace_exact(rep, rep.sphere.x(1)) == QRatFunc(0)


@pytest.mark.parametrize("family,n", [("even_plus", 1), ("even_minus", 2), ("odd_lambda", 1), ("odd_lambda", 2)])
def test_exact_and_numeric_traces_agree_on_random_balanced_words(family, n):
    rep = build_rep(family, n, -1 if family == "odd_lambda" else None)
    alg = rep.alg
    rng = random.Random(4)
    build = truncate(rep, 2.0, 30 if n == 1 else 16)
    tried = 0
    while tried < 12:
        word = random_word(rng, alg, 4)
        half = normal_form({word: 1}, alg)
        p = half.star() * half
        if p.is_zero():
            continue
        try:
            exact = trace_exact(rep, p)
        except NotTraceClass:
            continue
        tried += 1
        nt = numeric_trace(build(p))
        assert abs(nt.value - evaluate_numeric(exact, 2.0)) <= nt.tail_bound + 1e-10


def test_odd_x0_monomials_double_under_the_difference_of_even_families():
    plus, minus = build_rep("even_plus", 2), build_rep("even_minus", 2)
    x0, x1 = plus.sphere.x(0), plus.sphere.x(1)
    p = x0 * plus.sphere.xs(1) * x1
    diff = trace_exact(plus, p) - trace_exact(minus, p)
    assert diff == trace_exact(plus, p) * 2
