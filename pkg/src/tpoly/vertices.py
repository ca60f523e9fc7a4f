"""Vertices, edges and diameters of P_c = {x : Bx = c, x >= 0}.

Two enumeration routes are provided.  The exhaustive route solves every
rank-sized column subset.  The pivot route walks the bases that stay
feasible under the lexicographic perturbation ``c + e B1 + e^2 u_1 + ...``;
the perturbed polytope is simple, its bases are exactly the lexicographically
feasible ones, and every vertex of P_c is the limit of one of them.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Sequence

from .linalg import (LpProblem, Optimal, RatMatrix, determinant, fraction_str, inverse, rank, simplex_solve,
                     solve_square)
from .models import ConstraintSystem, InfeasibleMarginals, InputError, dimension

Basis = tuple[int, ...]


@dataclass(frozen=True)
class Vertex:
    point: tuple[Fraction, ...]
    bases: frozenset[Basis]
    cells: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(j for j, v in enumerate(self.point) if v)

    @property
    def support_cells(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.cells[j] for j in self.support)

    @property
    def table(self) -> dict[tuple[int, ...], Fraction]:
        """Nonzero entries keyed by cell."""
        return {self.cells[j]: v for j, v in enumerate(self.point) if v}

    def value(self, cell: tuple[int, ...]) -> Fraction:
        return self.point[self.cells.index(cell)]

    @property
    def basis(self) -> Basis:
        return min(self.bases)

    def is_degenerate(self, rank_: int) -> bool:
        return len(self.support) < rank_

    def to_json(self) -> dict:
        return {
            "support": [list(c) for c in sorted(self.support_cells)],
            "values": {",".join(map(str, c)): fraction_str(v) for c, v in sorted(self.table.items())},
            "bases": [list(b) for b in sorted(self.bases)],
        }


@dataclass
class SkeletonGraph:
    vertices: list[Vertex]
    edges: list[list[int]]
    flags: dict = field(default_factory=dict)

    @property
    def is_simple(self) -> bool:
        return bool(self.flags.get("is_simple"))

    def num_edges(self) -> int:
        return sum(len(a) for a in self.edges) // 2

    def degrees(self) -> list[int]:
        return [len(a) for a in self.edges]

    def index_of(self, point: Sequence[Fraction]) -> int:
        return self._lookup()[tuple(point)]

    def _lookup(self) -> dict:
        if not hasattr(self, "_by_point"):
            self._by_point = {v.point: i for i, v in enumerate(self.vertices)}
        return self._by_point


# ------------------------------------------------------------- basic solutions


def _reduced(sys: ConstraintSystem):
    rows, c = sys.reduced()
    return rows, c


def _solve_on(rows, c, basis: Basis) -> list[Fraction] | None:
    sub = [[row[j] for j in basis] for row in rows]
    return solve_square(sub, c)


def _point_from_basic(n: int, basis: Basis, xb: Sequence[Fraction]) -> tuple[Fraction, ...]:
    point = [Fraction(0)] * n
    for j, v in zip(basis, xb):
        point[j] = v
    return tuple(point)


def basic_solution(sys: ConstraintSystem, b: Iterable[int]) -> Vertex | None:
    """The basic solution of basis ``b`` when it is feasible, else ``None``."""
    basis = tuple(sorted(b))
    rows, c = _reduced(sys)
    if len(basis) != len(rows) or len(set(basis)) != len(basis):
        raise InputError("a basis needs %d distinct columns, got %r" % (len(rows), basis))
    if any(j < 0 or j >= sys.num_columns for j in basis):
        raise InputError("column index out of range in %r" % (basis,))
    xb = _solve_on(rows, c, basis)
    if xb is None:
        raise InputError("columns %r are linearly dependent" % (basis,))
    if any(v < 0 for v in xb):
        return None
    return Vertex(_point_from_basic(sys.num_columns, basis, xb), frozenset([basis]), sys.cells)


def _group_vertices(points: dict, cells) -> list[Vertex]:
    return [Vertex(p, frozenset(bs), cells) for p, bs in sorted(points.items(), key=lambda kv: min(kv[1]))]


def enumerate_vertices_exhaustive(sys: ConstraintSystem) -> list[Vertex]:
    """All vertices by solving every rank-sized column subset."""
    rows, c = _reduced(sys)
    r, n = len(rows), sys.num_columns
    points: dict[tuple, list[Basis]] = {}
    for basis in itertools.combinations(range(n), r):
        xb = _solve_on(rows, c, basis)
        if xb is None or any(v < 0 for v in xb):
            continue
        points.setdefault(_point_from_basic(n, basis, xb), []).append(basis)
    if not points:
        raise InfeasibleMarginals("the polytope is empty")
    return _group_vertices(points, sys.cells)


# --------------------------------------------------------- lexicographic pivots


class LexPivoter:
    """Simplex pivots with the lexicographic ratio test, in fraction-free integer form.

    A tableau is ``(A, D)`` with ``D > 0`` and ``A / D`` equal to
    ``[B_b^{-1} c | B_b^{-1} B1 | B_b^{-1}]``; the right side is pre-scaled by
    ``scale`` so that everything stays integral.  Pivot updates divide exactly.
    """

    def __init__(self, sys: ConstraintSystem):
        rows, c = _reduced(sys)
        self.sys = sys
        self.rows = rows
        self.r = len(rows)
        self.n = sys.num_columns
        scale = 1
        for v in c:
            scale = scale * v.denominator // gcd(scale, v.denominator)
        self.scale = scale
        self.c = [int(v * scale) for v in c]
        self.ones = [sum(row) for row in rows]
        self.col_rows = [tuple(i for i in range(self.r) if rows[i][j]) for j in range(self.n)]
        self.col_vals = [tuple(rows[i][j] for i in range(self.r) if rows[i][j]) for j in range(self.n)]

    def column(self, tab, j: int) -> list[int]:
        """D B_b^{-1} a_j; artificial columns j >= n stand for unit vectors."""
        A = tab[0]
        if j >= self.n:
            k = 2 + j - self.n
            return [row[k] for row in A]
        pairs = [(2 + i, v) for i, v in zip(self.col_rows[j], self.col_vals[j])]
        if all(v == 1 for _, v in pairs):
            ks = [k for k, _ in pairs]
            return [sum(row[k] for k in ks) for row in A]
        return [sum(row[k] * v for k, v in pairs) for row in A]

    @staticmethod
    def leaving_row(tab, e: Sequence[int]) -> int | None:
        A = tab[0]
        cand = [i for i, ei in enumerate(e) if ei > 0]
        col = 0
        while len(cand) > 1:
            best = cand[0]
            keep = [best]
            for i in cand[1:]:
                lhs = A[i][col] * e[best]
                rhs = A[best][col] * e[i]
                if lhs < rhs:
                    best, keep = i, [i]
                elif lhs == rhs:
                    keep.append(i)
            cand = keep
            col += 1
        return cand[0] if cand else None

    @staticmethod
    def pivot(tab, i: int, e: Sequence[int]):
        A, D = tab
        ei = e[i]
        out = []
        for k, row in enumerate(A):
            if k == i:
                out.append(row)
            elif e[k]:
                ek = e[k]
                out.append([(a * ei - ek * b) // D for a, b in zip(row, A[i])])
            else:
                out.append([(a * ei) // D for a in row])
        if ei < 0:
            out = [[-v for v in row] for row in out]
            ei = -ei
        return out, ei

    def tableau_for(self, basis: Basis):
        sub = [[row[j] for j in basis] for row in self.rows]
        inv = inverse(sub)
        if inv is None:
            return None
        det = abs(determinant(sub))
        A = []
        for irow in inv:
            ints = [int(v * det) for v in irow]
            A.append([sum(a * b for a, b in zip(ints, self.c)), sum(a * b for a, b in zip(ints, self.ones))] + ints)
        return A, int(det)

    def basic_values(self, tab) -> list[Fraction]:
        A, D = tab
        return [Fraction(row[0], D * self.scale) for row in A]

    @staticmethod
    def lex_feasible(tab) -> bool:
        for row in tab[0]:
            lead = next((v for v in row if v), 0)
            if lead <= 0:
                return False
        return True

    def phase_one(self):
        """A lexicographically feasible basis, from an all-artificial start."""
        r, n = self.r, self.n
        A = [[self.c[i], self.ones[i]] + [int(i == k) for k in range(r)] for i in range(r)]
        tab = (A, 1)
        basis = [n + i for i in range(r)]
        while True:
            # duals, up to the positive factor D
            pi = [0] * r
            for row, bv in zip(tab[0], basis):
                if bv >= n:
                    for k in range(r):
                        pi[k] += row[2 + k]
            enter = None
            inb = set(basis)
            for j in range(n):
                if j in inb:
                    continue
                if sum(pi[i] * v for i, v in zip(self.col_rows[j], self.col_vals[j])) > 0:
                    enter = j
                    break
            if enter is None:
                break
            e = self.column(tab, enter)
            i = self.leaving_row(tab, e)
            tab = self.pivot(tab, i, e)
            basis[i] = enter
        if any(bv >= n for bv in basis):
            raise InfeasibleMarginals("the polytope is empty")
        order = sorted(range(r), key=lambda i: basis[i])
        return tuple(basis[i] for i in order), ([tab[0][i] for i in order], tab[1])

    def neighbours(self, basis: Basis, tab):
        """Yield (entering, leaving row, new sorted basis, column) per nonbasic column."""
        inb = set(basis)
        for j in range(self.n):
            if j in inb:
                continue
            e = self.column(tab, j)
            i = self.leaving_row(tab, e)
            if i is None:
                continue
            nb = list(basis)
            nb[i] = j
            yield j, i, tuple(sorted(nb)), e

    def pivoted(self, basis: Basis, tab, j: int, i: int, e):
        A, D = self.pivot(tab, i, e)
        nb = list(basis)
        nb[i] = j
        order = sorted(range(self.r), key=lambda k: nb[k])
        return [A[k] for k in order], D


def _start_tableau(piv: LexPivoter, start: Iterable[int] | None):
    if start is not None:
        basis = tuple(sorted(start))
        if len(basis) != piv.r:
            raise InputError("a basis needs %d columns" % piv.r)
        tab = piv.tableau_for(basis)
        if tab is None:
            raise InputError("columns %r are linearly dependent" % (basis,))
        if any(v < 0 for v in piv.basic_values(tab)):
            raise InputError("start basis %r is infeasible" % (basis,))
        if piv.lex_feasible(tab):
            return basis, tab
    return piv.phase_one()


def lex_feasible_bases(sys: ConstraintSystem, start: Iterable[int] | None = None, stop=None):
    """Breadth-first search over lexicographically feasible bases.

    Returns ``(bases, tableaus, edges)``; ``stop(basis, tab)`` may end the walk early.
    """
    piv = LexPivoter(sys)
    basis, tab = _start_tableau(piv, start)
    index = {basis: 0}
    bases, tabs, edges = [basis], [tab], set()
    if stop is not None and stop(basis, tab):
        return bases, tabs, edges, piv
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for j, i, nb, d in piv.neighbours(bases[u], tabs[u]):
            v = index.get(nb)
            if v is None:
                ntab = piv.pivoted(bases[u], tabs[u], j, i, d)
                v = index[nb] = len(bases)
                bases.append(nb)
                tabs.append(ntab)
                if stop is not None and stop(nb, ntab):
                    return bases, tabs, edges, piv
                queue.append(v)
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return bases, tabs, edges, piv


def enumerate_vertices_pivot(sys: ConstraintSystem, start: Iterable[int] | None = None) -> SkeletonGraph:
    """Vertices and graph by pivoting from ``start`` (or a phase-one basis)."""
    bases, tabs, edges, piv = lex_feasible_bases(sys, start)
    n = sys.num_columns
    points: dict[tuple, list[Basis]] = {}
    point_of = []
    for b, tab in zip(bases, tabs):
        p = _point_from_basic(n, b, piv.basic_values(tab))
        points.setdefault(p, []).append(b)
        point_of.append(p)
    vertices = _group_vertices(points, sys.cells)
    vid = {v.point: i for i, v in enumerate(vertices)}
    adj = [set() for _ in vertices]
    for u, v in edges:
        a, b = vid[point_of[u]], vid[point_of[v]]
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    degenerate = any(v.is_degenerate(piv.r) for v in vertices)
    d = dimension(sys.family)
    flags = {
        "degenerate": degenerate,
        "is_simple": not degenerate and all(len(a) == d for a in adj),
        "dimension": d,
        "adjacency_exact": not degenerate,
        "lex_feasible_bases": len(bases),
    }
    return SkeletonGraph(vertices, [sorted(a) for a in adj], flags)


def find_degenerate_basis(sys: ConstraintSystem, exhaustive_limit: int = 5000) -> Basis | None:
    """A feasible basis with a zero basic value, or ``None`` when the polytope is non-degenerate."""
    rows, c = _reduced(sys)
    r, n = len(rows), sys.num_columns
    if comb(n, r) <= exhaustive_limit:
        found_any = False
        for basis in itertools.combinations(range(n), r):
            xb = _solve_on(rows, c, basis)
            if xb is None or any(v < 0 for v in xb):
                continue
            found_any = True
            if any(v == 0 for v in xb):
                return basis
        if not found_any:
            raise InfeasibleMarginals("the polytope is empty")
        return None
    hit = []

    def stop(basis, tab):
        if any(row[0] == 0 for row in tab[0]):
            hit.append(basis)
            return True
        return False

    lex_feasible_bases(sys, stop=stop)
    return hit[0] if hit else None


# ---------------------------------------------------------------- graph tools


def bfs_distances(adj: Sequence[Sequence[int]], source: int) -> list[int]:
    dist = [-1] * len(adj)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def graph_diameter(g: SkeletonGraph | Sequence[Sequence[int]]) -> int:
    adj = g.edges if isinstance(g, SkeletonGraph) else g
    if not adj:
        raise InputError("empty graph has no diameter")
    best = 0
    for s in range(len(adj)):
        dist = bfs_distances(adj, s)
        if min(dist) < 0:
            raise InputError("graph is disconnected")
        best = max(best, max(dist))
    return best


def graph_to_json(g: SkeletonGraph) -> dict:
    return {
        "vertices": [
            {"id": i, "point": [fraction_str(x) for x in v.point], **v.to_json()} for i, v in enumerate(g.vertices)
        ],
        "adjacency": g.edges,
        "flags": g.flags,
    }


def graph_to_dot(g: SkeletonGraph, name: str = "skeleton") -> str:
    lines = ["graph %s {" % name]
    for i, v in enumerate(g.vertices):
        label = " ".join("%s:%s" % ("".join(map(str, c)), fraction_str(x)) for c, x in sorted(v.table.items()))
        lines.append('  v%d [label="%s"];' % (i, label))
    for u, nbrs in enumerate(g.edges):
        for v in nbrs:
            if u < v:
                lines.append("  v%d -- v%d;" % (u, v))
    lines.append("}")
    return "\n".join(lines)


def dumps_graph(g: SkeletonGraph) -> str:
    return json.dumps(graph_to_json(g), sort_keys=True)


# -------------------------------------------------------------------- facets


def _max_min_support(rows, c, free: Sequence[int]) -> Fraction | None:
    """max t subject to B x = c, x >= 0, x_j = 0 off ``free``, x_k >= t on ``free``, t <= 1.

    Returns None when the face is empty.
    """
    free = list(free)
    nf = len(free)
    # variables: x_free (nf), t, s_k (nf), u
    ncol = nf + 1 + nf + 1
    a = []
    b = []
    for row, ci in zip(rows, c):
        a.append([row[j] for j in free] + [0] * (nf + 2))
        b.append(ci)
    for idx in range(nf):
        line = [0] * ncol
        line[idx] = 1
        line[nf] = -1
        line[nf + 1 + idx] = -1
        a.append(line)
        b.append(0)
    line = [0] * ncol
    line[nf] = 1
    line[-1] = 1
    a.append(line)
    b.append(1)
    obj = [0] * ncol
    obj[nf] = 1
    res = simplex_solve(LpProblem(RatMatrix.from_rows(a, cols=ncol), b, obj, "max"))
    if not isinstance(res, Optimal):
        return None
    return res.value


def _max_coordinate(rows, c, free: Sequence[int], k: int) -> Fraction | None:
    free = list(free)
    a = [[row[j] for j in free] for row in rows]
    obj = [int(j == k) for j in free]
    res = simplex_solve(LpProblem(RatMatrix.from_rows(a, cols=len(free)), c, obj, "max"))
    return res.value if isinstance(res, Optimal) else None


def _face_support(rows, c, free: Sequence[int]) -> list[int] | None:
    """Coordinates not identically zero on the face {x in P : x_j = 0 for j off ``free``}."""
    t = _max_min_support(rows, c, free)
    if t is None:
        return None
    if t > 0:
        return list(free)
    return [k for k in free if (_max_coordinate(rows, c, free, k) or 0) > 0]


def _face_dimension(rows, support: Sequence[int]) -> int:
    if not support:
        return 0
    return len(support) - rank([[row[j] for j in support] for row in rows])


def count_facets(sys: ConstraintSystem) -> int:
    """Number of coordinates whose nonnegativity constraint defines a facet."""
    rows, c = _reduced(sys)
    n = sys.num_columns
    support = _face_support(rows, c, range(n))
    if support is None:
        raise InfeasibleMarginals("the polytope is empty")
    if len(support) < n:
        raise InputError("polytope is not full-dimensional: coordinates %s vanish identically"
                         % sorted(set(range(n)) - set(support)))
    d = _face_dimension(rows, support)
    count = 0
    for j in range(n):
        free = [k for k in range(n) if k != j]
        face = _face_support(rows, c, free)
        if face is None:
            continue
        if _face_dimension(rows, face) == d - 1:
            count += 1
    return count
