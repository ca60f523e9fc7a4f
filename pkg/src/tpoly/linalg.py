"""Exact rational linear algebra and a dense two-phase simplex solver.

Matrices are carried either as :class:`RatMatrix` values or as plain nested
sequences of numbers; every routine converts its input to ``Fraction`` first,
so integers, fractions and strings such as ``"3/2"`` are all accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rational = Fraction


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted by the exact kernel: %r" % value)
    return Fraction(value)


def fraction_str(value: Fraction) -> str:
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "%d/%d" % (value.numerator, value.denominator)


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length %d != %d x %d" % (len(self.entries), self.rows, self.cols))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(to_fraction(v) for r in rows for v in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "RatMatrix":
        columns = [list(c) for c in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> list[Fraction]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list[Fraction]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def tolist(self) -> list[list[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def columns(self) -> list[list[Fraction]]:
        return [self.col(j) for j in range(self.cols)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix.from_rows(self.columns(), cols=self.rows)

    def select_columns(self, idx: Iterable[int]) -> "RatMatrix":
        idx = list(idx)
        return RatMatrix.from_rows([[r[j] for j in idx] for r in self.tolist()], cols=len(idx))

    def select_rows(self, idx: Iterable[int]) -> "RatMatrix":
        return RatMatrix.from_rows([self.row(i) for i in idx], cols=self.cols)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            return RatMatrix.from_rows(matmul(self.tolist(), other.tolist()), cols=other.cols)
        return matvec(self.tolist(), other)

    def rank(self) -> int:
        return rank(self)


def _as_rows(a) -> list[list[Fraction]]:
    if isinstance(a, RatMatrix):
        return a.tolist()
    return [[to_fraction(v) for v in row] for row in a]


def matmul(a, b) -> list[list[Fraction]]:
    a, b = _as_rows(a), _as_rows(b)
    if a and b and len(a[0]) != len(b):
        raise ValueError("dimension mismatch in matmul")
    bt = list(zip(*b)) if b else []
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a, v) -> list[Fraction]:
    a = _as_rows(a)
    v = [to_fraction(x) for x in v]
    if a and len(a[0]) != len(v):
        raise ValueError("dimension mismatch in matvec")
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def rref(a) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = _as_rows(a)
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        pivot_row = m[r]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], pivot_row)]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a) -> int:
    return len(rref(a)[1])


def independent_rows(a) -> list[int]:
    """Indices of a maximal set of linearly independent rows, chosen greedily in order."""
    rows = _as_rows(a)
    return rref(list(map(list, zip(*rows))) if rows else [])[1]


def solve_square(a, b) -> list[Fraction] | None:
    """Solve ``a x = b`` for square ``a``; ``None`` when ``a`` is singular."""
    m = _as_rows(a)
    b = [to_fraction(v) for v in b]
    n = len(m)
    if any(len(row) != n for row in m) or len(b) != n:
        raise ValueError("solve_square needs a square matrix and a matching right side")
    aug = [row + [bi] for row, bi in zip(m, b)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            return None
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        pr = aug[c]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], pr)]
    return [row[n] for row in aug]


def inverse(a) -> list[list[Fraction]] | None:
    m = _as_rows(a)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("inverse needs a square matrix")
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        return None
    return [row[n:] for row in red]


def determinant(a) -> Fraction:
    m = _as_rows(a)
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def nullspace_basis(a) -> RatMatrix:
    """Columns spanning the right nullspace of ``a``."""
    rows = _as_rows(a)
    if isinstance(a, RatMatrix):
        ncols = a.cols
    else:
        ncols = len(rows[0]) if rows else 0
    red, piv = rref(rows)
    free = [j for j in range(ncols) if j not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(piv):
            v[p] = -red[r][f]
        basis.append(v)
    return RatMatrix.from_columns(basis, rows=ncols) if basis else RatMatrix.zeros(ncols, 0)


def row_space_equal(a, b) -> bool:
    ra, pa = rref(a)
    rb, pb = rref(b)
    return pa == pb and ra[:len(pa)] == rb[:len(pb)]


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector with the same direction."""
    v = [to_fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


# ---------------------------------------------------------------- simplex


@dataclass(frozen=True)
class LpProblem:
    """minimize/maximize ``objective . x`` subject to ``A x = b`` and ``x >= 0``."""

    A: RatMatrix
    b: tuple[Fraction, ...]
    objective: tuple[Fraction, ...]
    sense: str = "min"

    def __post_init__(self):
        if not isinstance(self.A, RatMatrix):
            object.__setattr__(self, "A", RatMatrix.from_rows(self.A))
        object.__setattr__(self, "b", tuple(to_fraction(v) for v in self.b))
        object.__setattr__(self, "objective", tuple(to_fraction(v) for v in self.objective))
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        if len(self.b) != self.A.rows:
            raise ValueError("b has length %d, A has %d rows" % (len(self.b), self.A.rows))
        if len(self.objective) != self.A.cols:
            raise ValueError("objective has length %d, A has %d columns" % (len(self.objective), self.A.cols))


@dataclass(frozen=True)
class Optimal:
    x: tuple[Fraction, ...]
    value: Fraction
    basis: tuple[int, ...]


@dataclass(frozen=True)
class Infeasible:
    # y with y.A <= 0 and y.b > 0: a Farkas certificate
    certificate: tuple[Fraction, ...]


@dataclass(frozen=True)
class Unbounded:
    # feasible x and a ray d >= 0 with A d = 0 improving the objective
    x: tuple[Fraction, ...]
    ray: tuple[Fraction, ...]


LpResult = Optimal | Infeasible | Unbounded


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows  # each row: coefficients followed by rhs
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        rows = self.rows
        inv = 1 / rows[r][c]
        pr = [x * inv for x in rows[r]]
        rows[r] = pr
        for i, row in enumerate(rows):
            if i != r:
                f = row[c]
                if f:
                    rows[i] = [x - f * y for x, y in zip(row, pr)]
        self.basis[r] = c

    def reduced_costs(self, cost: Sequence[Fraction], ncols: int) -> list[Fraction]:
        rc = list(cost[:ncols])
        for row, bvar in zip(self.rows, self.basis):
            cb = cost[bvar]
            if cb:
                for j in range(ncols):
                    if row[j]:
                        rc[j] -= cb * row[j]
        return rc

    def run(self, cost: Sequence[Fraction], allowed: int) -> tuple[str, int]:
        """Bland's rule minimization over columns ``< allowed``."""
        while True:
            rc = self.reduced_costs(cost, allowed)
            enter = next((j for j in range(allowed) if rc[j] < 0), None)
            if enter is None:
                return "optimal", -1
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded", enter
            self.pivot(best[1], enter)


def simplex_solve(p: LpProblem) -> LpResult:
    """Exact two-phase simplex with Bland's anti-cycling rule."""
    m, n = p.A.rows, p.A.cols
    a = p.A.tolist()
    b = list(p.b)
    sign = []
    for i in range(m):
        if b[i] < 0:
            a[i] = [-x for x in a[i]]
            b[i] = -b[i]
            sign.append(-1)
        else:
            sign.append(1)
    rows = [a[i] + [Fraction(int(k == i)) for k in range(m)] + [b[i]] for i in range(m)]
    tab = _Tableau(rows, [n + i for i in range(m)])
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    tab.run(phase1, n + m)
    infeas = sum((row[-1] for row, bv in zip(tab.rows, tab.basis) if bv >= n), Fraction(0))
    if infeas > 0:
        rc = tab.reduced_costs(phase1, n + m)
        y = [sign[i] * (1 - rc[n + i]) for i in range(m)]
        return Infeasible(tuple(y))
    # drive remaining artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= n:
            c = next((j for j in range(n) if tab.rows[r][j] != 0), None)
            if c is None:
                del tab.rows[r]
                del tab.basis[r]
                continue
            tab.pivot(r, c)
        r += 1
    tab.rows = [row[:n] + [row[-1]] for row in tab.rows]
    cost = list(p.objective) if p.sense == "min" else [-x for x in p.objective]
    status, enter = tab.run(cost, n)
    x = [Fraction(0)] * n
    for row, bv in zip(tab.rows, tab.basis):
        x[bv] = row[-1]
    if status == "unbounded":
        ray = [Fraction(0)] * n
        ray[enter] = Fraction(1)
        for row, bv in zip(tab.rows, tab.basis):
            ray[bv] = -row[enter]
        return Unbounded(tuple(x), tuple(ray))
    value = sum((c * v for c, v in zip(p.objective, x)), Fraction(0))
    return Optimal(tuple(x), value, tuple(tab.basis))


def strictly_feasible_point(g: Sequence[Sequence]) -> tuple[Fraction, ...] | None:
    """A point ``p`` with ``g_i . p > 0`` for every row ``g_i``, or ``None``.

    Decided through Gordan's alternative: the rows admit a strictly positive
    point exactly when no convex combination of them vanishes, and the Farkas
    certificate of that infeasible combination is the point itself.
    """
    g = _as_rows(g)
    if not g:
        raise ValueError("need at least one inequality")
    dim = len(g[0])
    a = [[row[i] for row in g] for i in range(dim)] + [[Fraction(1)] * len(g)]
    b = [Fraction(0)] * dim + [Fraction(1)]
    res = simplex_solve(LpProblem(RatMatrix.from_rows(a, cols=len(g)), b, [0] * len(g)))
    if isinstance(res, Optimal):
        return None
    y = res.certificate
    return tuple(-v for v in y[:dim])
