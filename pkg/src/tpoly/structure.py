"""Planar/classical correspondences, lexicographic chambers and cut arithmetic.

A planar 2 x m x n polytope is the same thing as an m x n transportation
polytope with entry capacities (keep the slice ``a[1][j][k]``).  For m = 2 the
capacitated polytope is a 1-way polytope with bounds, which after translating
the lower bounds to zero is again a classical 2 x n polytope.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .chambers import Chamber
from .linalg import to_fraction
from .models import (Family, InfeasibleMarginals, InputError, Marginals, _check_consistent, build_system,
                     DegenerateRHS)
from .vertices import SkeletonGraph, Vertex, enumerate_vertices_pivot

Point = tuple[Fraction, ...]


def _require_planar(m: Marginals, l: int | None = 2, mm: int | None = None) -> tuple[int, int, int]:
    f = m.family
    if f.kind != "planar" or (l is not None and f.shape[0] != l) or (mm is not None and f.shape[1] != mm):
        want = "Planar(%s,%s,n)" % (l or "l", mm or "m")
        raise InputError("expected %s marginals, got %s" % (want, f))
    _check_consistent(m)
    return f.shape


# ------------------------------------------------------------ capacitated


@dataclass(frozen=True)
class CapacitatedClassical:
    """``{a in R^{m x n}, a >= 0 : row sums x, column sums y, a <= z}``."""

    x: tuple[Fraction, ...]
    y: tuple[Fraction, ...]
    z: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(to_fraction(v) for v in self.x))
        object.__setattr__(self, "y", tuple(to_fraction(v) for v in self.y))
        object.__setattr__(self, "z", tuple(tuple(to_fraction(v) for v in row) for row in self.z))
        if len(self.z) != len(self.x) or any(len(row) != len(self.y) for row in self.z):
            raise InputError("capacity matrix must be %dx%d" % (len(self.x), len(self.y)))
        if any(v < 0 for v in self.x + self.y + sum(self.z, ())):
            raise InputError("capacitated data must be nonnegative")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.x), len(self.y)

    def contains(self, a: Sequence[Sequence]) -> bool:
        m, n = self.shape
        return (all(sum(a[j]) == self.x[j] for j in range(m))
                and all(sum(a[j][k] for j in range(m)) == self.y[k] for k in range(n))
                and all(0 <= a[j][k] <= self.z[j][k] for j in range(m) for k in range(n)))

    def to_planar(self) -> Marginals:
        return capacitated_to_planar(self)

    def vertices(self) -> list[tuple[tuple[Fraction, ...], ...]]:
        """Vertices as m x n matrices, via the planar embedding."""
        g = enumerate_vertices_pivot(build_system(Family.planar(2, *self.shape), self.to_planar()))
        return sorted(project_to_capacitated(v.point, *self.shape) for v in g.vertices)


def planar2mn_to_capacitated(m: Marginals) -> CapacitatedClassical:
    """The capacitated m x n polytope obtained by keeping the first slice."""
    _, mm, n = _require_planar(m)
    return CapacitatedClassical(m.W[0], m.V[0], m.U)


def capacitated_to_planar(q: CapacitatedClassical) -> Marginals:
    mm, n = q.shape
    x2 = [sum(q.z[j]) - q.x[j] for j in range(mm)]
    y2 = [sum(q.z[j][k] for j in range(mm)) - q.y[k] for k in range(n)]
    if any(v < 0 for v in x2 + y2):
        raise InfeasibleMarginals("capacities are smaller than the prescribed sums")
    return Marginals.planar(q.z, [q.y, y2], [q.x, x2])


def project_to_capacitated(point: Sequence, mm: int, n: int) -> tuple[tuple[Fraction, ...], ...]:
    """``a[i][j][k] -> a[1][j][k]`` for a point of a planar 2 x m x n polytope (cells in lex order)."""
    return tuple(tuple(Fraction(point[j * n + k]) for k in range(n)) for j in range(mm))


def lift_from_capacitated(a: Sequence[Sequence], z: Sequence[Sequence]) -> Point:
    mm, n = len(z), len(z[0])
    first = [Fraction(a[j][k]) for j in range(mm) for k in range(n)]
    second = [Fraction(z[j][k]) - Fraction(a[j][k]) for j in range(mm) for k in range(n)]
    return tuple(first + second)


# -------------------------------------------------------- 2 x 2 x n planar


@dataclass(frozen=True)
class Planar22nMap:
    """Affine isomorphism between a Planar(2,2,n) polytope and a Classical(2,n) polytope.

    ``alpha`` is the translation applied to ``a[1][1][k]`` so that its lower
    bound becomes zero; ``beta - alpha`` are the column sums of the image.
    """

    planar: Marginals
    classical: Marginals
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def forward(self, point: Sequence) -> Point:
        n = len(self.alpha)
        t = [Fraction(point[k]) - self.alpha[k] for k in range(n)]  # cells (1,1,k) come first
        return tuple(t + [self.beta[k] - self.alpha[k] - t[k] for k in range(n)])

    def backward(self, point: Sequence) -> Point:
        n = len(self.alpha)
        U, V = self.planar.U, self.planar.V
        a11 = [self.alpha[k] + Fraction(point[k]) for k in range(n)]
        a12 = [V[0][k] - a11[k] for k in range(n)]
        a21 = [U[0][k] - a11[k] for k in range(n)]
        a22 = [a11[k] + U[1][k] - V[0][k] for k in range(n)]
        return tuple(a11 + a12 + a21 + a22)


def planar22n_to_classical(m: Marginals) -> Planar22nMap:
    _, _, n = _require_planar(m, 2, 2)
    U, V, W = m.U, m.V, m.W
    alpha = tuple(max(Fraction(0), U[0][k] - V[1][k]) for k in range(n))
    beta = tuple(min(V[0][k], U[0][k]) for k in range(n))
    if any(a > b for a, b in zip(alpha, beta)):
        raise InfeasibleMarginals("empty planar polytope: a slice has lower bound above upper bound")
    x1 = W[0][0] - sum(alpha)
    y = [b - a for a, b in zip(alpha, beta)]
    x2 = sum(y) - x1
    if x1 < 0 or x2 < 0:
        raise InfeasibleMarginals("empty planar polytope: W[1][1] is outside the reachable range")
    return Planar22nMap(m, Marginals.classical([x1, x2], y), alpha, beta)


def classical_to_planar22n(m: Marginals) -> Marginals:
    """Planar(2,2,n) marginals whose polytope is the given Classical(2,n) one, via a[j,k] = a[1,j,k] = a[2,3-j,k]."""
    f = m.family
    if f.kind != "classical" or f.shape[0] != 2:
        raise InputError("expected Classical(2,n) marginals, got %s" % f)
    _check_consistent(m)
    x, y = m.x, m.y
    return Marginals.planar([y, y], [y, y], [[x[0], x[1]], [x[1], x[0]]])


def embed_classical_point(point: Sequence, n: int) -> Point:
    """``a[j][k] -> a[1][j][k] = a[2][3-j][k]``."""
    row1, row2 = list(point[:n]), list(point[n:2 * n])
    return tuple(Fraction(v) for v in row1 + row2 + row2 + row1)


def vertex_correspondence(mp: Planar22nMap) -> tuple[SkeletonGraph, SkeletonGraph, list[int]]:
    """Skeletons of both sides and the vertex bijection induced by ``mp.forward``.

    Raises KeyError if the image of a vertex is not a vertex.
    """
    gp = enumerate_vertices_pivot(build_system(mp.planar.family, mp.planar))
    gc = enumerate_vertices_pivot(build_system(mp.classical.family, mp.classical))
    perm = [gc.index_of(mp.forward(v.point)) for v in gp.vertices]
    assert sorted(perm) == list(range(len(gc.vertices))), "vertex map is not a bijection"
    return gp, gc, perm


def preserves_edges(gp: SkeletonGraph, gc: SkeletonGraph, perm: Sequence[int]) -> bool:
    ep = {frozenset((perm[u], perm[v])) for u, nbrs in enumerate(gp.edges) for v in nbrs}
    ec = {frozenset((u, v)) for u, nbrs in enumerate(gc.edges) for v in nbrs}
    return ep == ec


# ----------------------------------------------------- lexicographic chamber


def _lex_marginals(m: int, n: int, eps: Fraction) -> Marginals:
    # columns 2..n carry eps, eps^2, ...; rows get generic shares of the total
    tail = [eps ** k for k in range(1, n)]
    total = Fraction(m * (m + 1) // 2 + 1)
    weights = [Fraction(i + 1) + Fraction(1, 2 ** (i + 1)) for i in range(m)]
    x = [total * w / sum(weights) for w in weights]
    y = [total - sum(tail)] + tail
    den = math.lcm(*(v.denominator for v in x + y))
    return Marginals.classical([v * den for v in x], [v * den for v in y])


def _representative(marg: Marginals) -> tuple[int, ...]:
    sys = build_system(marg.family, marg)
    return tuple(int(sys.c[i]) for i in sys.independent_rows)


def lexicographic_chamber(m: int, n: int, orientation: str = "columns") -> Chamber:
    """The lexicographic chamber of the product of simplices with m x n vertices.

    ``orientation="columns"`` peels the last column (cardinality m^(n-1));
    ``"rows"`` peels the last row (cardinality n^(m-1)).
    """
    if m < 1 or n < 1:
        raise InputError("m and n must be positive")
    if orientation == "rows":
        t = lexicographic_chamber(n, m, "columns")
        mt = t.marginals
        swap = Marginals.classical(mt[n:], mt[:n])
        idx = {(i, j): p for p, (i, j) in enumerate(Family.classical(m, n).cells)}
        sig = frozenset(tuple(sorted(idx[(b % m + 1, b // m + 1)] for b in basis)) for basis in t.signature)
        return Chamber(_representative(swap), sig, swap.rhs())
    if orientation != "columns":
        raise InputError("orientation must be 'columns' or 'rows'")
    eps = Fraction(1, 4)
    last = None
    for _ in range(12):
        marg = _lex_marginals(m, n, eps)
        g = enumerate_vertices_pivot(build_system(Family.classical(m, n), marg))
        sig = frozenset(b for v in g.vertices for b in v.bases)
        if not g.flags["degenerate"] and last is not None and sig == last:
            return Chamber(_representative(marg), sig, marg.rhs())
        last = None if g.flags["degenerate"] else sig
        eps /= 4
    raise DegenerateRHS("no stable generic point found near the lexicographic chamber")


# ------------------------------------------------------------- cuts / GCD


@dataclass(frozen=True)
class BipartiteCut:
    """``V+`` of a cut of the directed complete bipartite graph K_{m,n}; the rest is ``V-``."""

    rows_plus: frozenset[int]
    cols_plus: frozenset[int]

    def cocircuit(self, m: int, n: int) -> tuple[set[tuple[int, int]], set[tuple[int, int]]]:
        """Edges (i, j) leaving V+ and entering V+."""
        out = {(i, j) for i in range(1, m + 1) for j in range(1, n + 1)
               if i in self.rows_plus and j not in self.cols_plus}
        into = {(i, j) for i in range(1, m + 1) for j in range(1, n + 1)
                if i not in self.rows_plus and j in self.cols_plus}
        return out, into


def cut_delta(m: int, n: int, cut: BipartiteCut) -> int:
    if not (cut.rows_plus <= set(range(1, m + 1)) and cut.cols_plus <= set(range(1, n + 1))):
        raise InputError("cut is not a subset of the vertex set of K_{%d,%d}" % (m, n))
    return len(cut.rows_plus) * n - len(cut.cols_plus) * m


def all_cuts(m: int, n: int) -> Iterable[BipartiteCut]:
    for r in range(m + 1):
        for rows in itertools.combinations(range(1, m + 1), r):
            for s in range(n + 1):
                for cols in itertools.combinations(range(1, n + 1), s):
                    yield BipartiteCut(frozenset(rows), frozenset(cols))


@dataclass
class DivisibilityReport:
    m: int
    n: int
    divisor: int
    counts: list[int]
    violations: list[int]

    @property
    def ok(self) -> bool:
        return not self.violations


def gcd_divisibility_check(m: int, n: int, counts: Iterable[int]) -> DivisibilityReport:
    g = math.gcd(m, n)
    counts = sorted(counts)
    return DivisibilityReport(m, n, g, counts, [c for c in counts if c % g])
