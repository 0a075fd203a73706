"""Square matrices with entries in a presented algebra."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .presentation import NCPoly, Presentation


class NotSquare(ValueError):
    pass


@dataclass
class CheckResult:
    ok: bool
    witness: str = ""

    def __bool__(self):
        return self.ok


class MatNC:
    """An r x r matrix of :class:`NCPoly` over one presentation."""

    __slots__ = ("alg", "rows")

    def __init__(self, alg: Presentation, rows: Sequence[Sequence]):
        self.alg = alg
        r = len(rows)
        fixed = []
        for row in rows:
            if len(row) != r:
                raise NotSquare(f"row of length {len(row)} in a {r}-row matrix")
            fixed.append(tuple(x if isinstance(x, NCPoly) else alg.scalar(x) for x in row))
        self.rows = tuple(fixed)

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, alg: Presentation, r: int, scale=1) -> "MatNC":
        return cls(alg, [[alg.scalar(scale if i == j else 0) for j in range(r)] for i in range(r)])

    @classmethod
    def zero(cls, alg: Presentation, r: int) -> "MatNC":
        return cls.identity(alg, r, 0)

    @classmethod
    def blocks(cls, alg: Presentation, a: "MatNC", b: "MatNC", c: "MatNC", d: "MatNC") -> "MatNC":
        """Assemble ``((a, b), (c, d))`` from four equal-size blocks."""
        m = a.size
        rows = []
        for i in range(m):
            rows.append(list(a.rows[i]) + list(b.rows[i]))
        for i in range(m):
            rows.append(list(c.rows[i]) + list(d.rows[i]))
        return cls(alg, rows)

    def __add__(self, other: "MatNC") -> "MatNC":
        return MatNC(self.alg, [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "MatNC") -> "MatNC":
        return MatNC(self.alg, [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self) -> "MatNC":
        return MatNC(self.alg, [[-x for x in r] for r in self.rows])

    def scale(self, c) -> "MatNC":
        return MatNC(self.alg, [[x.scale(c) for x in r] for r in self.rows])

    def __mul__(self, other):
        if not isinstance(other, MatNC):
            return self.scale(other)
        r = self.size
        out = []
        for i in range(r):
            row = []
            for j in range(r):
                acc = self.alg.scalar(0)
                for k in range(r):
                    a = self.rows[i][k]
                    b = other.rows[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return MatNC(self.alg, out)

    def star(self) -> "MatNC":
        r = self.size
        return MatNC(self.alg, [[self.rows[j][i].star() for j in range(r)] for i in range(r)])

    def trace(self) -> NCPoly:
        acc = self.alg.scalar(0)
        for i in range(self.size):
            acc = acc + self.rows[i][i]
        return acc

    def map_entries(self, f, alg: Presentation | None = None) -> "MatNC":
        return MatNC(alg or self.alg, [[f(x) for x in r] for r in self.rows])

    def permute(self, perm: Sequence[int]) -> "MatNC":
        """Conjugate by the permutation matrix sending basis vector perm[i] to i."""
        return MatNC(self.alg, [[self.rows[perm[i]][perm[j]] for j in range(self.size)] for i in range(self.size)])

    def direct_sum_zero(self, k: int) -> "MatNC":
        """``diag(self, 0_k)``."""
        r = self.size
        zero = self.alg.scalar(0)
        rows = [list(self.rows[i]) + [zero] * k for i in range(r)]
        rows += [[zero] * (r + k) for _ in range(k)]
        return MatNC(self.alg, rows)

    def __eq__(self, other):
        return isinstance(other, MatNC) and self.alg is other.alg and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def first_difference(self, other: "MatNC") -> str:
        for i in range(self.size):
            for j in range(self.size):
                d = self.rows[i][j] - other.rows[i][j]
                if d:
                    return f"entry ({i},{j}) residual {d.text()}"
        return ""

    def text(self) -> str:
        return "\n".join("[" + ", ".join(x.text() for x in r) + "]" for r in self.rows)

    def __repr__(self):
        return f"MatNC[{self.alg.name}, {self.size}x{self.size}]"


def mat_check(m: MatNC, kind: str) -> CheckResult:
    """Verify a defining matrix identity entrywise in normal form."""
    ident = MatNC.identity(m.alg, m.size)
    if kind == "idempotent":
        diff = (m * m).first_difference(m)
    elif kind == "self_adjoint":
        diff = m.star().first_difference(m)
    elif kind == "unipotent":
        diff = (m * m).first_difference(ident)
    elif kind == "unitary":
        diff = (m * m.star()).first_difference(ident)
        if not diff:
            diff = (m.star() * m).first_difference(ident)
            diff = f"u*u: {diff}" if diff else ""
        else:
            diff = f"uu*: {diff}"
    else:
        raise ValueError(f"unknown matrix property {kind!r}")
    return CheckResult(not diff, diff)
