"""Batch command line: verification suites, Chern characters, traces, integrals, pairings.

Exit status is 0 when every check passes (or a computation succeeds), 1 when a
check fails or a computation is undefined, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from . import __version__
from .expr import ParseError, parse_expression
from .ncalg import (
    CyclicChain,
    Presentation,
    chern_even,
    chern_odd,
    confluence_probe,
    connes_B,
    hochschild_b,
    mat_check,
    random_word,
)
from .ncalg.presentation import NCPoly

Thunk = Callable[[], tuple[bool, str]]


@dataclass
class CheckRecord:
    name: str
    status: str
    witness: str
    elapsed_ms: float


@dataclass
class RunReport:
    suite: str
    seed: int
    checks: list[CheckRecord] = field(default_factory=list)
    version: str = __version__

    @property
    def status(self) -> str:
        return "pass" if all(c.status != "fail" for c in self.checks) else "fail"

    def as_dict(self, timing: bool = True) -> dict:
        checks = []
        for c in self.checks:
            row = {"name": c.name, "status": c.status, "witness": c.witness}
            if timing:
                row["elapsed_ms"] = round(c.elapsed_ms, 3)
            checks.append(row)
        return {"suite": self.suite, "seed": self.seed, "version": self.version, "checks": checks, "status": self.status}

    def text(self) -> str:
        lines = [f"suite {self.suite} (seed {self.seed})"]
        for c in self.checks:
            extra = f"  [{c.witness}]" if c.witness else ""
            lines.append(f"  {c.status.upper():4} {c.name}{extra}")
        lines.append(f"status: {self.status}")
        return "\n".join(lines)


def run_checks(suite: str, seed: int, checks: Iterator[tuple[str, Thunk]]) -> RunReport:
    report = RunReport(suite, seed)
    for name, thunk in checks:
        start = time.perf_counter()
        try:
            ok, witness = thunk()
            status = "pass" if ok else "fail"
        except Exception as exc:  # a crashing check is a failing check with its error as witness
            status, witness = "fail", f"{type(exc).__name__}: {exc}"
        report.checks.append(CheckRecord(name, status, witness, 1000 * (time.perf_counter() - start)))
    return report


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteContext:
    n: int | None
    seed: int
    trials: int | None


def _mat(m, kind: str) -> tuple[bool, str]:
    r = mat_check(m, kind)
    return r.ok, r.witness


def _probe(alg: Presentation, trials: int, seed: int) -> tuple[bool, str]:
    r = confluence_probe(alg, trials=trials, seed=seed)
    return r.ok, f"{len(r.discrepancies)} discrepancies in {trials} words"


def _zero(chain: CyclicChain) -> tuple[bool, str]:
    return chain.is_zero(), f"{len(chain.terms)} terms"


def _range(ctx: SuiteContext, lo: int, hi: int) -> range:
    return range(ctx.n, ctx.n + 1) if ctx.n is not None else range(lo, hi + 1)


def suite_spheres_presentations(ctx: SuiteContext):
    from .qspheres import sphere_by_name

    trials = ctx.trials or 10_000
    for d in range(2, 8):
        sp = sphere_by_name(f"Sq{d}")
        yield f"confluence Sq{d}", lambda a=sp.alg: _probe(a, trials, ctx.seed)


def suite_unipotents(ctx: SuiteContext):
    from .qspheres import unipotent

    for n in _range(ctx, 1, 3):
        yield f"u_({2 * n}) unipotent", lambda n=n: _mat(unipotent(2 * n + 1), "unipotent")
        yield f"u_({2 * n}) self-adjoint", lambda n=n: _mat(unipotent(2 * n + 1), "self_adjoint")
        yield f"u_({2 * n - 1}) unipotent", lambda n=n: _mat(unipotent(2 * n), "unipotent")


def suite_ktheory_generators(ctx: SuiteContext):
    from .qspheres import idempotent_even, unitary_odd
    from .scalars import QLaurent

    def ch0(n):
        k = idempotent_even(n)
        sp = k.sphere
        coeff = (QLaurent({-1: 1}) - 1) ** n * Fraction(1, 2)
        expected = CyclicChain.tensor([sp.x(0)], coeff)
        got = chern_even(k.matrix, 0)
        return (got - expected).is_zero(), f"{len(got.terms)} terms"

    def ch_half(n):
        k = unitary_odd(n)
        sp = k.sphere
        coeff = (QLaurent({-2: 1}) - 1) ** n * Fraction(1, 2)
        expected = CyclicChain.tensor([sp.x(1), sp.xs(1)], coeff) - CyclicChain.tensor([sp.xs(1), sp.x(1)], coeff)
        got = chern_odd(k.matrix, 0)
        return (got - expected).is_zero(), f"{len(got.terms)} terms"

    for n in _range(ctx, 1, 3):
        yield f"e_({2 * n}) idempotent", lambda n=n: _mat(idempotent_even(n).matrix, "idempotent")
        yield f"e_({2 * n}) self-adjoint", lambda n=n: _mat(idempotent_even(n).matrix, "self_adjoint")
        yield f"V_({2 * n + 1}) unitary", lambda n=n: _mat(unitary_odd(n).matrix, "unitary")
        yield f"ch_0(e_({2 * n})) = 1/2 (q^-1 - 1)^{n} x0", lambda n=n: ch0(n)
        yield f"ch_1/2(V_({2 * n + 1})) closed form", lambda n=n: ch_half(n)


def suite_representations(ctx: SuiteContext):
    from .representations import (
        adjointness_check,
        build_rep,
        numeric_trace,
        relation_check,
        sigma_intertwining,
        trace_exact,
        truncate,
    )
    from .scalars import GaussRational, evaluate_numeric

    def make(family, n):
        # a Pythagorean point on the unit circle stands in for a generic phase
        return build_rep(family, n, GaussRational(Fraction(3, 5), Fraction(4, 5)) if family == "odd_lambda" else None)

    def rel(family, n):
        rep = make(family, n)
        r = relation_check(rep, q_value=2.0, K=30, tol=1e-12)
        return r.ok, f"max residual {r.max_residual:.2e} over {r.checked_states} states"

    def adj(family, n):
        rep = make(family, n)
        bad = adjointness_check(rep)
        return not bad, "; ".join(bad)

    def trace_agree(n):
        rep = build_rep("even_plus", n)
        x0 = rep.sphere.x(0)
        exact = trace_exact(rep, x0)
        num = numeric_trace(truncate(rep, 2.0, 40)(x0))
        val = complex(evaluate_numeric(exact, 2.0))
        err = abs(num.value - val)
        return err <= num.tail_bound + 1e-12, f"exact {val.real:.15g}, numeric {num.value.real:.15g}, tail {num.tail_bound:.2e}"

    ns = list(_range(ctx, 1, 3))
    for family in ("even_plus", "even_minus"):
        for n in ns:
            yield f"relations {family} n={n}", lambda f=family, n=n: rel(f, n)
            yield f"adjointness {family} n={n}", lambda f=family, n=n: adj(f, n)
    for family in ("odd_lambda", "odd_fourier"):
        for n in [0] + ns:
            yield f"relations {family} n={n}", lambda f=family, n=n: rel(f, n)
            yield f"adjointness {family} n={n}", lambda f=family, n=n: adj(f, n)
    for n in ns:
        yield f"sigma intertwining n={n}", lambda n=n: (sigma_intertwining(n), "")
        yield f"exact vs numeric trace of x0 n={n}", lambda n=n: trace_agree(n)


def _monomials(sp, degree: int) -> list[NCPoly]:
    from .ncalg import words_up_to

    return [NCPoly.from_raw(sp.alg, {w: 1}) for w in words_up_to(sp.alg, degree)]


def suite_fredholm_cocycles(ctx: SuiteContext):
    from .fredholm import cochain_b, cyclicity_check, phi_cochain, tau0_cochain, tau1_cochain, vanishes_on
    from .qspheres import sphere_algebra

    def trace_property(make, N, degree):
        sp = sphere_algebra(N)
        tau = make(sp)
        mons = _monomials(sp, degree)
        pairs = [(a, b) for a in mons for b in mons if len(next(iter(a.terms))) + len(next(iter(b.terms))) <= degree]
        ok = vanishes_on(cochain_b(tau), pairs)
        return ok, f"{len(pairs)} pairs"

    def cocycle(n, degree):
        sp = sphere_algebra(2 * n + 2)
        phi = phi_cochain(sp)
        mons = _monomials(sp, degree)
        size = {id(m): len(next(iter(m.terms))) for m in mons}
        pairs = [(a, b) for a in mons for b in mons if size[id(a)] + size[id(b)] <= degree]
        triples = [
            (a, b, c)
            for a in mons
            for b in mons
            for c in mons
            if size[id(a)] + size[id(b)] + size[id(c)] <= degree
        ]
        ok = cyclicity_check(phi, pairs) and vanishes_on(cochain_b(phi), triples)
        return ok, f"{len(pairs)} pairs, {len(triples)} triples"

    for n in _range(ctx, 1, 2):
        yield f"b tau0 = 0 on Sq{2 * n}", lambda n=n: trace_property(tau0_cochain, 2 * n + 1, 3)
        yield f"b tau1 = 0 on Sq{2 * n}", lambda n=n: trace_property(tau1_cochain, 2 * n + 1, 3)
        yield f"phi cyclic cocycle on Sq{2 * n + 1}", lambda n=n: cocycle(n, 3)


def suite_pairings(ctx: SuiteContext):
    from .fredholm import determinant, odd_pairing, pairing_matrix

    def even(n):
        m = pairing_matrix(n)
        expected = [[1, 2 ** (n - 1)], [0, (-1) ** n]]
        return m == expected and abs(determinant(m)) == 1, json.dumps(m)

    for n in _range(ctx, 1, 3):
        yield f"pairing matrix n={n}", lambda n=n: even(n)
    for n in _range(ctx, 0, 2):
        yield f"odd pairing n={n}", lambda n=n: (odd_pairing(n) == (-1) ** (n + 1), str(odd_pairing(n)))


def suite_theta4(ctx: SuiteContext):
    from . import theta

    trials = ctx.trials or 10_000
    e = theta.s_theta4_projection
    yield "confluence Stheta4", lambda: _probe(theta.s_theta4().alg, trials, ctx.seed)
    yield "confluence Stheta3", lambda: _probe(theta.s_theta3().alg, trials, ctx.seed)
    yield "e idempotent", lambda: _mat(e(), "idempotent")
    yield "e self-adjoint", lambda: _mat(e(), "self_adjoint")
    yield "tr e = 2", lambda: (e().trace() == theta.s_theta4().alg.scalar(2), str(e().trace()))
    yield "ch_0(e) = 0", lambda: _zero(chern_even(e(), 0))
    yield "ch_1(e) = 0", lambda: _zero(chern_even(e(), 1))
    yield "b ch_2(e) = 0", lambda: _zero(hochschild_b(chern_even(e(), 2)))
    yield "ch_2(e) != 0", lambda: (not chern_even(e(), 2).is_zero(), f"{len(chern_even(e(), 2).terms)} terms")
    yield "q unitary over Stheta3", lambda: _mat(theta.s_theta3_unitary(), "unitary")
    yield "ch_1/2(q) = 0", lambda: _zero(chern_odd(theta.s_theta3_unitary(), 0))
    yield "theta_projection(2) matches e", lambda: (theta.theta_projection_matches_s_theta4(), "")


def suite_theta_clifford(ctx: SuiteContext):
    from . import theta

    trials = ctx.trials or 10_000
    for n in _range(ctx, 1, 3):
        cl = theta.clifford_algebra(n)
        yield f"confluence Cliff{n}", lambda a=cl.alg: _probe(a, trials, ctx.seed)

        def chir(cl=cl):
            res = theta.chirality_checks(cl)
            bad = [k for k, v in res.items() if not v]
            return not bad, ", ".join(bad)

        yield f"chirality Cliff{n}", chir
        yield f"matrix model n={n}", lambda n=n: (theta.clifford_matrices(n) is not None, f"size {2 ** n}")
        yield f"theta_projection({n}) idempotent", lambda n=n: _mat(theta.theta_projection(n), "idempotent")
        yield f"theta_projection({n}) self-adjoint", lambda n=n: _mat(theta.theta_projection(n), "self_adjoint")
        yield f"theta_unitary({n}) unitary", lambda n=n: _mat(theta.theta_unitary(n), "unitary")
        for k in range(n):
            yield f"ch_{k}(theta_projection({n})) = 0", lambda n=n, k=k: _zero(chern_even(theta.theta_projection(n), k))
        for k in range(n - 1):
            yield f"ch_{k}+1/2(theta_unitary({n})) = 0", lambda n=n, k=k: _zero(chern_odd(theta.theta_unitary(n), k))
        yield f"ch_{n - 1}+1/2(theta_unitary({n})) != 0", lambda n=n: (
            not chern_odd(theta.theta_unitary(n), n - 1).is_zero(),
            "top-degree class",
        )


def suite_twist_lemmas(ctx: SuiteContext):
    from . import theta

    def report():
        r = theta.twist_lemma_report(3)
        return r.ok, f"{r.checked} identities, failures {r.failures[:3]}"

    def assoc():
        rng = random.Random(ctx.seed)
        Sym = theta.BigradedSymbol
        factors = lambda: rng.choice(  # noqa: E731
            [
                Sym.atom(rng.choice("abc"), rng.randint(-3, 3), rng.randint(-3, 3)),
                Sym.lam(*(rng.randint(-2, 2) for _ in range(5))),
                Sym.J(rng.choice([1, -1])),
                Sym.scalar(theta.Phase.lam(1, 2, rng.randint(-2, 2))),
            ]
        )
        bad = 0
        for _ in range(ctx.trials or 200):
            x, y, z = (factors() * factors() for _ in range(3))
            if not theta.symbols_equal((x * y) * z, x * (y * z)):
                bad += 1
        return bad == 0, f"{bad} non-associative triples"

    yield "twist identities for all bidegrees with |n_i| <= 3", report
    yield "symbol products associative", assoc


def suite_moyal(ctx: SuiteContext):
    from . import theta

    trials = ctx.trials or 10_000
    yield "confluence Ttheta2", lambda: _probe(theta.torus_algebra(2).alg, trials, ctx.seed)
    for n in _range(ctx, 2, 3):
        for bound in (3,):
            def assoc(n=n, bound=bound):
                r = theta.moyal_associativity_check(n, bound)
                return r.ok, f"{r.checked} triples"

            def iso(n=n, bound=bound):
                r = theta.moyal_torus_iso_check(n, bound)
                return r.ok, f"{r.checked} pairs"

            yield f"associativity n={n} |r|<={bound}", assoc
            yield f"torus intertwiner n={n} |r|<={bound}", iso


def suite_poisson(ctx: SuiteContext):
    from .qspheres import ClassicalPoly, poisson_bracket, sphere_by_name

    def gens(sp):
        return [sp.alg.element(g.display) for g in sp.alg.generators]

    def antisym(name):
        g = gens(sphere_by_name(name))
        bad = [(a, b) for a in g for b in g if not (poisson_bracket(a, b) + poisson_bracket(b, a)).is_zero()]
        return not bad, f"{len(g) ** 2} pairs"

    def leibniz(name):
        g = gens(sphere_by_name(name))
        cl = ClassicalPoly.from_ncpoly_at_one
        bad = 0
        for a, b, c in itertools.product(g, repeat=3):
            lhs = poisson_bracket(a, b * c)
            rhs = poisson_bracket(a, b) * cl(c) + cl(b) * poisson_bracket(a, c)
            bad += not (lhs - rhs).is_zero()
        return bad == 0, f"{bad} failing triples of {len(g) ** 3}"

    def jacobi(name):
        g = gens(sphere_by_name(name))
        bad = 0
        for a, b, c in itertools.product(g, repeat=3):
            s = (
                poisson_bracket(a, poisson_bracket(b, c))
                + poisson_bracket(b, poisson_bracket(c, a))
                + poisson_bracket(c, poisson_bracket(a, b))
            )
            bad += not s.is_zero()
        return bad == 0, f"{bad} failing triples of {len(g) ** 3}"

    for name in ("Sq2", "Sq3"):
        yield f"antisymmetry {name}", lambda name=name: antisym(name)
        yield f"Leibniz {name}", lambda name=name: leibniz(name)
        yield f"Jacobi {name}", lambda name=name: jacobi(name)


def random_chain(alg: Presentation, degree: int, rng: random.Random, terms: int = 2, max_len: int = 3) -> CyclicChain:
    """A sum of a few elementary tensors of random normal-form words."""
    chain = CyclicChain(alg, degree, {})
    for _ in range(terms):
        slots = []
        for s in range(degree + 1):
            p = NCPoly.from_raw(alg, {random_word(rng, alg, max_len): 1})
            if s and not p.without_constant().terms:
                p = alg.element(alg.generators[rng.randrange(len(alg.generators))].display)
            slots.append(p)
        chain = chain + CyclicChain.tensor(slots, rng.choice([1, -1, 2]))
    return chain


def bicomplex_residuals(alg: Presentation, trials: int, seed: int) -> tuple[int, int]:
    """Count chains (degree 1..3) on which b^2, B^2 or bB + Bb fail to vanish."""
    rng = random.Random(seed)
    bad = 0
    for t in range(trials):
        c = random_chain(alg, 1 + t % 3, rng)
        bb = hochschild_b(hochschild_b(c)) if c.degree >= 2 else None
        BB = connes_B(connes_B(c))
        anti = hochschild_b(connes_B(c)) + connes_B(hochschild_b(c))
        if (bb is not None and not bb.is_zero()) or not BB.is_zero() or not anti.is_zero():
            bad += 1
    return bad, trials


def suite_bicomplex(ctx: SuiteContext):
    from . import theta
    from .qspheres import sphere_by_name

    trials = ctx.trials or 1000
    for name, alg in (("Sq2", lambda: sphere_by_name("Sq2").alg), ("Stheta4", lambda: theta.s_theta4().alg)):
        def check(alg=alg):
            bad, total = bicomplex_residuals(alg(), trials, ctx.seed)
            return bad == 0, f"{bad} of {total} chains"

        yield f"b^2 = B^2 = bB + Bb = 0 on {name}", check


SUITES: dict[str, Callable] = {
    "spheres-presentations": suite_spheres_presentations,
    "unipotents": suite_unipotents,
    "ktheory-generators": suite_ktheory_generators,
    "representations": suite_representations,
    "fredholm-cocycles": suite_fredholm_cocycles,
    "pairings": suite_pairings,
    "theta4": suite_theta4,
    "theta-clifford": suite_theta_clifford,
    "twist-lemmas": suite_twist_lemmas,
    "moyal": suite_moyal,
    "poisson": suite_poisson,
    "bicomplex": suite_bicomplex,
}
ALIASES = {"clifford": "theta-clifford"}


def suite_registry() -> list[str]:
    return list(SUITES)


def run_suite(name: str, n: int | None = None, seed: int = 0, trials: int | None = None) -> RunReport:
    name = ALIASES.get(name, name)
    ctx = SuiteContext(n, seed, trials)
    return run_checks(name, seed, SUITES[name](ctx))


# ---------------------------------------------------------------------------
# Algebra lookup and the computational subcommands
# ---------------------------------------------------------------------------


def algebra_by_name(name: str) -> Presentation:
    """``Sq<d>``, ``Stheta<d>``, ``Ttheta<n>``, ``Cliff<n>`` or ``S4theta`` (alpha, beta, z)."""
    from . import theta
    from .qspheres import sphere_by_name

    try:
        if name.startswith("Sq"):
            return sphere_by_name(name).alg
        if name == "S4theta":
            return theta.s_theta4().alg
        if name == "S3theta":
            return theta.s_theta3().alg
        if name.startswith("Stheta"):
            return theta.theta_sphere(int(name[6:])).alg
        if name.startswith("Ttheta"):
            return theta.torus_algebra(int(name[6:])).alg
        if name.startswith("Cliff"):
            return theta.clifford_algebra(int(name[5:])).alg
    except (KeyError, ValueError):
        pass
    raise UsageError(f"--algebra: unknown algebra {name!r}")


class UsageError(Exception):
    pass


def chern_object(obj: str, n: int, degree: int) -> CyclicChain:
    from . import theta
    from .qspheres import idempotent_even, unitary_odd

    if obj == "e":
        return chern_even(idempotent_even(n).matrix, degree)
    if obj == "V":
        return chern_odd(unitary_odd(n).matrix, degree)
    if obj == "theta-e":
        return chern_even(theta.theta_projection(n), degree)
    if obj == "theta-u":
        return chern_odd(theta.theta_unitary(n), degree)
    if obj == "s4-e":
        return chern_even(theta.s_theta4_projection(), degree)
    if obj == "s3-q":
        return chern_odd(theta.s_theta3_unitary(), degree)
    raise UsageError(f"--object: unknown object {obj!r}")


REP_FAMILIES = {"even+": "even_plus", "even-": "even_minus", "odd-lambda": "odd_lambda", "odd-fourier": "odd_fourier"}


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.n, args.seed, args.trials)
    if args.format == "json":
        _emit(json.dumps(report.as_dict(timing=not args.no_timing), indent=2), args.out)
    else:
        _emit(report.text(), args.out)
    return 0 if report.status == "pass" else 1


def cmd_chern(args) -> int:
    chain = chern_object(args.object, args.n, args.degree)
    if args.format == "json":
        payload = {
            "object": args.object,
            "n": args.n,
            "degree": args.degree,
            "zero": chain.is_zero(),
            "terms": len(chain.terms),
            "chain": chain.text(),
        }
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        _emit(chain.text(limit=args.limit) if not chain.is_zero() else "0", args.out)
    return 0


def cmd_pairing(args) -> int:
    from .fredholm import determinant, odd_pairing, pairing_matrix

    if args.family == "even":
        matrix = pairing_matrix(args.n)
        det = determinant(matrix)
    else:
        matrix = [[odd_pairing(args.n)]]
        det = matrix[0][0]
    if args.format == "json":
        _emit(json.dumps({"n": args.n, "matrix": matrix, "determinant": det, "exact": True}), args.out)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "value"])
        for i, row in enumerate(matrix):
            for j, v in enumerate(row):
                w.writerow([i, j, v])
        _emit(buf.getvalue().rstrip("\n"), args.out)
    else:
        rows = "\n".join("  ".join(f"{v:3d}" for v in row) for row in matrix)
        _emit(f"{rows}\ndeterminant {det}", args.out)
    return 0


def cmd_integrate(args) -> int:
    from .fredholm import integral_even, integral_odd
    from .qspheres import sphere_by_name

    try:
        sp = sphere_by_name(args.sphere)
    except KeyError:
        raise UsageError(f"--sphere: unknown sphere {args.sphere!r}") from None
    a = parse_expression(args.a, sp.alg)
    if sp.even:
        if args.b is not None:
            raise UsageError("--b: even spheres integrate a single element")
        value = integral_even(a)
    else:
        if args.b is None:
            raise UsageError("--b: odd spheres integrate a da-type pair, pass --b")
        value = integral_odd(a, parse_expression(args.b, sp.alg))
    _emit(str(value), args.out)
    return 0


def cmd_trace(args) -> int:
    from .representations import build_rep, numeric_trace, trace_exact, truncate

    family = REP_FAMILIES[args.rep]
    lam = None
    if family == "odd_lambda":
        lam = "formal"
    rep = build_rep(family, args.n, lam)
    p = parse_expression(args.expr, rep.sphere.alg)
    if args.numeric:
        if family == "odd_lambda":
            raise UsageError("--numeric: needs a concrete phase, use --rep even+ or even-")
        res = numeric_trace(truncate(rep, args.q, args.cutoff)(p))
        value = res.value
        shown = f"{value.real:.15g}" if abs(value.imag) < 1e-300 else f"{value:.15g}"
        _emit(f"{shown} (tail bound {res.tail_bound:.3e}, cutoff {res.cutoff}, q = {args.q:g})", args.out)
        return 0
    value = trace_exact(rep, p)
    if isinstance(value, dict):
        text = "\n".join(f"phase^{k}: {v}" for k, v in sorted(value.items()))
    else:
        text = str(value)
    _emit(text, args.out)
    return 0


def cmd_reduce(args) -> int:
    alg = algebra_by_name(args.algebra)
    _emit(parse_expression(args.expr, alg).text(), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncspheres", description="Exact computations on deformed spheres.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json")):
        p.add_argument("--format", choices=formats, default="text")
        p.add_argument("--out", help="write the result to this file instead of stdout")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=suite_registry() + list(ALIASES))
    v.add_argument("--n", type=int, help="restrict the suite to one value of n")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, help="number of random samples for probabilistic checks")
    v.add_argument("--no-timing", action="store_true", help="omit elapsed times from JSON reports")
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("chern", help="compute a Chern character component")
    c.add_argument("--object", required=True, choices=["e", "V", "theta-e", "theta-u", "s4-e", "s3-q"])
    c.add_argument("--n", type=int, default=1)
    c.add_argument("--degree", type=int, default=0, help="k in ch_k (even) or ch_{k+1/2} (odd)")
    c.add_argument("--limit", type=int, default=40, help="maximum number of terms printed in text mode")
    common(c)
    c.set_defaults(func=cmd_chern)

    p = sub.add_parser("pairing", help="index pairings between K-homology and K-theory")
    p.add_argument("--family", choices=["even", "odd"], default="even")
    p.add_argument("--n", type=int, default=1)
    common(p, ("text", "json", "csv"))
    p.set_defaults(func=cmd_pairing)

    i = sub.add_parser("integrate", help="singular integrals on Sq<d>")
    i.add_argument("--sphere", required=True)
    i.add_argument("--a", required=True)
    i.add_argument("--b")
    common(i, ("text",))
    i.set_defaults(func=cmd_integrate)

    t = sub.add_parser("trace", help="operator traces in the sphere representations")
    t.add_argument("--rep", required=True, choices=list(REP_FAMILIES))
    t.add_argument("--n", type=int, default=1)
    t.add_argument("--expr", required=True)
    mode = t.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="closed-form trace (default)")
    mode.add_argument("--numeric", action="store_true", help="truncated numeric trace with tail bound")
    t.add_argument("--q", type=float, default=2.0)
    t.add_argument("--cutoff", type=int, default=40)
    common(t, ("text",))
    t.set_defaults(func=cmd_trace)

    r = sub.add_parser("reduce", help="normal form of an expression")
    r.add_argument("--algebra", required=True)
    r.add_argument("--expr", required=True)
    common(r, ("text",))
    r.set_defaults(func=cmd_reduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError) as exc:
        parser.error(str(exc))
    except (ArithmeticError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
