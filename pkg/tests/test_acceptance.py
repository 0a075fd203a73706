"""Acceptance criteria 1 to 13.

Each criterion is a function returning ``(ok, detail)``. Running this file
directly, or through pytest, prints one PASS/FAIL line per criterion.
Criteria known not to hold as stated are marked as strict expected failures,
so they still print FAIL and would turn the suite red if they started passing.
"""

import itertools
import sys
import time
from fractions import Fraction

import pytest

from ncspheres import theta
from ncspheres.cli import bicomplex_residuals
from ncspheres.fredholm import (
    cochain_b,
    cyclicity_check,
    determinant,
    integral_even,
    integral_odd,
    odd_pairing,
    pairing_matrix,
    phi_cochain,
    tau0_cochain,
    tau1_cochain,
    trace_a_commutator,
    vanishes_on,
)
from ncspheres.ncalg import (
    CyclicChain,
    chern_even,
    chern_odd,
    confluence_probe,
    hochschild_b,
    mat_check,
    words_up_to,
)
from ncspheres.ncalg.presentation import NCPoly
from ncspheres.qspheres import (
    ClassicalPoly,
    idempotent_even,
    poisson_bracket,
    sphere_algebra,
    sphere_by_name,
    unipotent,
    unitary_odd,
)
from ncspheres.representations import (
    build_rep,
    numeric_trace,
    relation_check,
    sigma_intertwining,
    trace_exact,
    truncate,
)
from ncspheres.scalars import GaussRational, QLaurent, QRatFunc, evaluate_numeric

QI = QLaurent.monomial(-1)
QI2 = QLaurent.monomial(-2)

CRITERIA = {}
ACCEPTANCE_RESULTS = {}


def criterion(number, title, limit=None, known_failure=None):
    def register(fn):
        CRITERIA[number] = (title, fn, limit, known_failure)
        return fn

    return register


def run_criterion(number):
    title, fn, limit, _ = CRITERIA[number]
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed > limit:
        ok = False
        detail = f"{detail}; over the {limit} s limit"
    ACCEPTANCE_RESULTS[number] = (ok, title, detail, elapsed)
    return ok, detail, elapsed


def result_line(number):
    ok, title, detail, elapsed = ACCEPTANCE_RESULTS[number]
    return f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} ({elapsed:.1f} s)"


def _failures(items):
    return [name for name, ok in items if not ok]


# 1 ------------------------------------------------------------------------------------------


@criterion(1, "presentation soundness", limit=60)
def presentations():
    algebras = [(f"Sq{d}", sphere_by_name(f"Sq{d}").alg) for d in range(2, 8)]
    algebras += [("Stheta3", theta.s_theta3().alg), ("Stheta4", theta.s_theta4().alg)]
    algebras += [("Ttheta2", theta.torus_algebra(2).alg)]
    algebras += [(f"Cliff{n}", theta.clifford_algebra(n).alg) for n in (1, 2, 3)]
    total = 0
    bad = []
    for name, alg in algebras:
        report = confluence_probe(alg, trials=10_000, seed=0)
        total += len(report.discrepancies)
        if not report.ok:
            bad.append(name)
    return not bad, f"{total} discrepancies over 10^4 words in each of {len(algebras)} presentations {bad or ''}".rstrip()


# 2 ------------------------------------------------------------------------------------------


@criterion(2, "K-theory generators", limit=120)
def generators():
    checks = []
    for n in (1, 2, 3):
        u_even, u_odd = unipotent(2 * n + 1), unipotent(2 * n)
        e, v = idempotent_even(n).matrix, unitary_odd(n).matrix
        checks += [
            (f"u_({2 * n}) unipotent", mat_check(u_even, "unipotent").ok),
            (f"u_({2 * n}) self-adjoint", mat_check(u_even, "self_adjoint").ok),
            (f"u_({2 * n - 1}) unipotent", mat_check(u_odd, "unipotent").ok),
            (f"e_({2 * n}) idempotent", mat_check(e, "idempotent").ok),
            (f"e_({2 * n}) self-adjoint", mat_check(e, "self_adjoint").ok),
            (f"V_({2 * n + 1}) unitary", mat_check(v, "unitary").ok),
        ]
    bad = _failures(checks)
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} exact identities {bad or ''}".rstrip()


# 3 ------------------------------------------------------------------------------------------


@criterion(3, "Chern characters", limit=60)
def chern_characters():
    checks = []
    for n in (1, 2, 3):
        k = idempotent_even(n)
        expected = CyclicChain.tensor([k.sphere.x(0)], (QI - 1) ** n * Fraction(1, 2))
        checks.append((f"ch_0(e_({2 * n}))", chern_even(k.matrix, 0) == expected))
        v = unitary_odd(n)
        sp = v.sphere
        c = (QI2 - 1) ** n * Fraction(1, 2)
        expected = CyclicChain.tensor([sp.x(1), sp.xs(1)], c) - CyclicChain.tensor([sp.xs(1), sp.x(1)], c)
        checks.append((f"ch_1/2(V_({2 * n + 1}))", chern_odd(v.matrix, 0) == expected))
    e = theta.s_theta4_projection()
    ch2 = chern_even(e, 2)
    checks += [
        ("S_theta^4 ch_0(e) = 0", chern_even(e, 0).is_zero()),
        ("S_theta^4 ch_1(e) = 0", chern_even(e, 1).is_zero()),
        ("S_theta^4 b ch_2(e) = 0", hochschild_b(ch2).is_zero()),
    ]
    bad = _failures(checks)
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} exact, ch_2(e) has {len(ch2.terms)} terms {bad or ''}".rstrip()


# 4 ------------------------------------------------------------------------------------------


@criterion(
    4,
    "theta projection and unitary characters",
    limit=600,
    known_failure="ch_{n-1/2}(theta_unitary(n)) is a nonzero top-degree class; only k < n - 1 vanishes",
)
def theta_characters():
    checks = []
    for n in (1, 2, 3):
        e, u = theta.theta_projection(n), theta.theta_unitary(n)
        for k in range(n):
            checks.append((f"ch_{k}(e), n={n}", chern_even(e, k).is_zero()))
        for k in range(n):
            checks.append((f"ch_{k}+1/2(u), n={n}", chern_odd(u, k).is_zero()))
    bad = _failures(checks)
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} vanish; nonzero: {', '.join(bad) or 'none'}"


# 5 ------------------------------------------------------------------------------------------


@criterion(5, "representations")
def representations():
    lam = GaussRational(Fraction(3, 5), Fraction(4, 5))
    checks = []
    worst = 0.0
    for family, ns in (("even_plus", (1, 2, 3)), ("even_minus", (1, 2, 3)), ("odd_lambda", (0, 1, 2, 3)), ("odd_fourier", (0, 1, 2, 3))):
        for n in ns:
            rep = build_rep(family, n, lam if family == "odd_lambda" else None)
            report = relation_check(rep, q_value=2.0, K=30, tol=1e-12)
            worst = max(worst, report.max_residual)
            checks.append((f"{family} n={n}", report.ok))
    for n in (1, 2, 3):
        checks.append((f"sigma intertwining n={n}", sigma_intertwining(n)))
    bad = _failures(checks)
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} pass, max residual {worst:.1e} {bad or ''}".rstrip()


# 6 ------------------------------------------------------------------------------------------


@criterion(6, "exact traces")
def traces():
    checks = []
    for n in (1, 2, 3):
        rep = build_rep("even_plus", n)
        checks.append((f"Tr x0 n={n}", trace_exact(rep, rep.sphere.x(0)) == QRatFunc(1, (1 - QI) ** n)))
    for n in (0, 1, 2, 3):
        sp = sphere_algebra(2 * n + 2)
        value = trace_a_commutator(sp.xs(1), sp.x(1))
        checks.append((f"Tr(x1*[F,x1]) n={n}", value == QRatFunc(2, (1 - QI2) ** n)))
    worst_ratio = 0.0
    for n in (1, 2, 3):
        rep = build_rep("even_plus", n)
        build = truncate(rep, 2.0, 40)
        x0, x1 = rep.sphere.x(0), rep.sphere.x(1)
        for name, p in (("x0", x0), ("x0^3", x0**3), ("x0 x1* x1", x0 * rep.sphere.xs(1) * x1)):
            exact = complex(evaluate_numeric(trace_exact(rep, p), 2.0))
            nt = numeric_trace(build(p))
            err = abs(nt.value - exact)
            ok = err <= nt.tail_bound + 1e-12 * max(1.0, abs(exact))
            worst_ratio = max(worst_ratio, err / nt.tail_bound if nt.tail_bound else 0.0)
            checks.append((f"numeric {name} n={n}", ok))
    bad = _failures(checks)
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} exact or within tail bound (worst error/bound {worst_ratio:.2f}) {bad or ''}".rstrip()


# 7 ------------------------------------------------------------------------------------------


@criterion(
    7,
    "integrals",
    known_failure="the integral of x1 d(x1*) is phi(x1, x1*) = -(1-q^-2)^-n; the stated value is phi(x1*, x1)",
)
def integrals():
    checks = []
    for n in (1, 2, 3):
        sp = sphere_algebra(2 * n + 1)
        for i in range(0, n + 1):
            expected = QRatFunc(2, (1 - QI) ** n) if i == 0 else QRatFunc(0)
            checks.append((f"even n={n} x{i}", integral_even(sp.x(i)) == expected))
    for n in (0, 1, 2, 3):
        sp = sphere_algebra(2 * n + 2)
        for i in range(1, n + 2):
            for j in range(1, n + 2):
                expected = QRatFunc(1, (1 - QI2) ** n) if (i, j) == (1, 1) else QRatFunc(0)
                got = integral_odd(sp.x(i), sp.xs(j))
                checks.append((f"odd n={n} x{i} dx{j}* = {got}", got == expected))
    bad = _failures(checks)
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} exact; mismatches: {', '.join(bad) or 'none'}"


# 8 ------------------------------------------------------------------------------------------


@criterion(8, "pairings", limit=60)
def pairings():
    checks = []
    shown = []
    for n in (1, 2, 3):
        m = pairing_matrix(n)
        shown.append(str(m))
        checks.append((f"matrix n={n}", m == [[1, 2 ** (n - 1)], [0, (-1) ** n]] and abs(determinant(m)) == 1))
    for n in (0, 1, 2):
        value = odd_pairing(n)
        shown.append(str(value))
        checks.append((f"odd n={n}", value == (-1) ** (n + 1)))
    bad = _failures(checks)
    return not bad, f"{' '.join(shown)} {bad or ''}".rstrip()


# 9 ------------------------------------------------------------------------------------------


def _monomials(sp, degree):
    return [NCPoly.from_raw(sp.alg, {w: 1}) for w in words_up_to(sp.alg, degree)]


@criterion(9, "cocycle properties")
def cocycles():
    checks = []
    counted = 0
    for name in ("Sq2", "Sq3", "Sq4", "Sq5"):
        sp = sphere_by_name(name)
        mons = _monomials(sp, 3)
        pairs = list(itertools.product(mons, repeat=2))
        counted += len(pairs)
        checks.append((f"b tau0 {name}", vanishes_on(cochain_b(tau0_cochain(sp)), pairs)))
        if sp.even:
            checks.append((f"b tau1 {name}", vanishes_on(cochain_b(tau1_cochain(sp)), pairs)))
        else:
            phi = phi_cochain(sp)
            triples = list(itertools.product(mons, repeat=3))
            counted += len(triples)
            checks.append((f"phi antisymmetric {name}", cyclicity_check(phi, pairs)))
            checks.append((f"b phi {name}", vanishes_on(cochain_b(phi), triples)))
    bad = _failures(checks)
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} exact on {counted} tuples of monomials of degree <= 3 {bad or ''}".rstrip()


# 10 -----------------------------------------------------------------------------------------


@criterion(10, "bicomplex identities")
def bicomplex():
    checks = []
    for name, alg in (("Sq2", sphere_by_name("Sq2").alg), ("Sq3", sphere_by_name("Sq3").alg), ("Stheta4", theta.s_theta4().alg)):
        bad, total = bicomplex_residuals(alg, 1000, seed=0)
        checks.append((f"{name} ({bad}/{total})", bad == 0))
    bad = _failures(checks)
    return not bad, f"b^2 = B^2 = bB + Bb = 0 on 10^3 chains per algebra, {len(checks) - len(bad)}/{len(checks)} algebras {bad or ''}".rstrip()


# 11 -----------------------------------------------------------------------------------------


@criterion(11, "twist lemmas", limit=10)
def twists():
    report = theta.twist_lemma_report(3)
    return report.ok, f"{report.checked} normal-form identities, {len(report.failures)} failures"


# 12 -----------------------------------------------------------------------------------------


@criterion(12, "Moyal product")
def moyal():
    checks = []
    count = 0
    for n in (1, 2, 3):
        r = theta.moyal_associativity_check(n, 3)
        count += r.checked
        checks.append((f"associativity n={n}", r.ok))
    for n in (2, 3):
        r = theta.moyal_torus_iso_check(n, 3)
        count += r.checked
        checks.append((f"torus n={n}", r.ok))
    bad = _failures(checks)
    return not bad, f"{count} exact identities for |r| <= 3 {bad or ''}".rstrip()


# 13 -----------------------------------------------------------------------------------------


@criterion(13, "Poisson bracket")
def poisson():
    checks = []
    cl = ClassicalPoly.from_ncpoly_at_one
    for name in ("Sq2", "Sq3"):
        sp = sphere_by_name(name)
        g = [sp.alg.element(x.display) for x in sp.alg.generators]
        anti = leib = jac = True
        for a, b, c in itertools.product(g, repeat=3):
            anti &= (poisson_bracket(a, b) + poisson_bracket(b, a)).is_zero()
            leib &= (poisson_bracket(a, b * c) - poisson_bracket(a, b) * cl(c) - cl(b) * poisson_bracket(a, c)).is_zero()
            jac &= (
                poisson_bracket(a, poisson_bracket(b, c))
                + poisson_bracket(b, poisson_bracket(c, a))
                + poisson_bracket(c, poisson_bracket(a, b))
            ).is_zero()
        checks += [(f"antisymmetry {name}", anti), (f"Leibniz {name}", leib), (f"Jacobi {name}", jac)]
    bad = _failures(checks)
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} identities on all generator triples {bad or ''}".rstrip()


# pytest entry points ------------------------------------------------------------------------


def _params():
    for number in sorted(CRITERIA):
        known = CRITERIA[number][3]
        marks = [pytest.mark.xfail(strict=True, reason=known)] if known else []
        yield pytest.param(number, id=f"criterion_{number}", marks=marks)


@pytest.mark.parametrize("number", list(_params()))
def test_criterion(number):
    ok, detail, _ = run_criterion(number)
    print(result_line(number))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number in sorted(CRITERIA):
        ok, _, _ = run_criterion(number)
        failed += not ok
        print(result_line(number), flush=True)
    sys.exit(1 if failed else 0)
