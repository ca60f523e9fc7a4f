"""Gale transforms and regular triangulations of vector configurations.

This is the second, independent route to the chambers of cone(B): regular
triangulations of the Gale transform are enumerated by bistellar flips from a
seed, and the complement of every simplex is a basis of B.  Nothing here uses
the hyperplane machinery of :mod:`tpoly.chambers`.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .chambers import int_det, integer_gale
from .linalg import (LpProblem, Optimal, RatMatrix, independent_rows, nullspace_basis, primitive, rank, simplex_solve,
                     solve_square, strictly_feasible_point)
from .models import ConstraintSystem, Family, InputError, build_system

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class VectorConfig:
    vectors: tuple[tuple[int, ...], ...]  # one integer vector per column of B
    labels: tuple = ()

    @property
    def rank(self) -> int:
        return len(self.vectors[0]) if self.vectors else 0

    def __len__(self) -> int:
        return len(self.vectors)

    def matrix(self) -> RatMatrix:
        """Vectors as the columns of a matrix."""
        return RatMatrix.from_columns(self.vectors, rows=self.rank)

    def is_independent(self, idx: Iterable[int]) -> bool:
        idx = list(idx)
        if len(idx) == self.rank:
            return int_det([[self.vectors[j][i] for j in idx] for i in range(self.rank)]) != 0
        return rank([[self.vectors[j][i] for j in idx] for i in range(self.rank)]) == len(idx)

    def coordinates(self, simplex: Simplex, j: int) -> list[Fraction]:
        """Coefficients of vector ``j`` in the basis ``simplex``."""
        m = [[self.vectors[s][i] for s in simplex] for i in range(self.rank)]
        return solve_square(m, self.vectors[j])


@dataclass(frozen=True)
class Triangulation:
    simplices: frozenset[Simplex]

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def key(self) -> tuple[Simplex, ...]:
        return tuple(sorted(self.simplices))


def configuration(sys_or_family) -> tuple[list[tuple[int, ...]], int]:
    sys = sys_or_family if isinstance(sys_or_family, ConstraintSystem) else build_system(sys_or_family)
    rows = [sys.matrix[i] for i in sys.independent_rows]
    return rows, sys.num_columns


def gale_transform(sys_or_family: ConstraintSystem | Family | Sequence[Sequence[int]]) -> VectorConfig:
    """A configuration whose row space is the orthogonal complement of the row space of B."""
    if isinstance(sys_or_family, (ConstraintSystem, Family)):
        rows, n = configuration(sys_or_family)
        labels = (sys_or_family.cells if isinstance(sys_or_family, ConstraintSystem) else sys_or_family.cells)
    else:
        full = [[int(v) for v in r] for r in sys_or_family]
        n = len(full[0])
        rows = [full[i] for i in independent_rows(full)]
        labels = tuple(range(1, n + 1))
    gale_rows = integer_gale(rows, n)
    return VectorConfig(tuple(tuple(g[j] for g in gale_rows) for j in range(n)), tuple(labels))


def is_totally_cyclic(conf: VectorConfig) -> bool:
    """True when the vectors positively span the whole space."""
    # a strictly positive dependency, written with x_j = 1 + s_j, s >= 0
    k, n = conf.rank, len(conf)
    a = [[conf.vectors[j][i] for j in range(n)] for i in range(k)]
    res = simplex_solve(LpProblem(RatMatrix.from_rows(a, cols=n), [-sum(row) for row in a], [0] * n))
    return isinstance(res, Optimal)


# -------------------------------------------------------------- regularity


def _facets_of(s: Simplex):
    for i in range(len(s)):
        yield s[:i] + s[i + 1:], s[i]


def _wall_rows(conf: VectorConfig, t: Triangulation) -> list[tuple[int, ...]]:
    """Integer rows ``g`` with ``g . w > 0`` for heights ``w`` inducing ``t``.

    One row per interior wall (the opposite vertex lies above the wall's lifted
    simplex) and one per unused vector (it lies above the simplex whose cone
    contains it).  Raises InputError when ``t`` is not a complete simplicial fan.
    """
    n, k = len(conf), conf.rank
    cells = sorted(t.simplices)
    for s in cells:
        if len(s) != k or not conf.is_independent(s):
            raise InputError("%r is not a full-rank simplex" % (s,))
    by_facet: dict[Simplex, list[tuple[Simplex, int]]] = {}
    for s in cells:
        for f, v in _facets_of(s):
            by_facet.setdefault(f, []).append((s, v))
    rows = []
    for f, owners in sorted(by_facet.items()):
        if len(owners) != 2:
            raise InputError("facet %r lies in %d simplices; not a triangulation of a totally cyclic configuration"
                             % (f, len(owners)))
        (s1, v1), (_, v2) = owners
        mu = conf.coordinates(s1, v2)
        if mu[s1.index(v1)] >= 0:
            raise InputError("simplices %r and %r overlap" % (s1, owners[1][0]))
        rows.append(_row(n, v2, s1, mu))
    used = set(itertools.chain.from_iterable(cells))
    for j in range(n):
        if j in used:
            continue
        for s in cells:
            mu = conf.coordinates(s, j)
            if all(v >= 0 for v in mu):
                rows.append(_row(n, j, s, mu))
                break
        else:
            raise InputError("vector %d is not covered by any simplex" % j)
    return rows


def _row(n: int, j: int, s: Simplex, mu: Sequence[Fraction]) -> tuple[int, ...]:
    row = [Fraction(0)] * n
    row[j] = Fraction(1)
    for i, m in zip(s, mu):
        row[i] -= m
    return primitive(row)


def is_regular(conf: VectorConfig, t: Triangulation) -> bool:
    """Whether some height vector induces ``t``, decided exactly.

    Heights proposed by a floating-point LP are rounded and checked with
    integers; otherwise the exact strict-feasibility LP decides.
    """
    rows = _wall_rows(conf, t)
    if not rows:
        return True
    R = np.array(rows, dtype=np.int64)
    m, n = R.shape
    norms = np.linalg.norm(R, axis=1)
    cobj = np.zeros(n + 1)
    cobj[-1] = -1.0
    res = linprog(cobj, A_ub=np.hstack([-R.astype(float), norms[:, None]]), b_ub=np.zeros(m),
                  bounds=[(-1.0, 1.0)] * n + [(None, 1.0)], method="highs")
    if res.status == 0 and res.x[-1] > 1e-9:
        w = res.x[:n] / np.abs(res.x[:n]).max()
        for bits in (6, 10, 16, 24, 32, 40):
            wi = np.rint(w * (1 << bits)).astype(np.int64)
            if np.all(R @ wi > 0):
                return True
    return strictly_feasible_point(rows) is not None


def regular_triangulation(conf: VectorConfig, heights: Sequence) -> Triangulation:
    """The subdivision induced by ``heights``; must be a triangulation (generic heights)."""
    n, k = len(conf), conf.rank
    heights = [Fraction(h) for h in heights]
    cells = []
    for s in itertools.combinations(range(n), k):
        if not conf.is_independent(s):
            continue
        ok = True
        for j in range(n):
            if j in s:
                continue
            mu = conf.coordinates(s, j)
            diff = heights[j] - sum((m * heights[i] for i, m in zip(s, mu)), Fraction(0))
            if diff <= 0:
                if diff == 0:
                    raise InputError("heights are not generic")
                ok = False
                break
        if ok:
            cells.append(s)
    return Triangulation(frozenset(cells))


def seed_triangulation(conf: VectorConfig) -> Triangulation:
    """A placing-type regular triangulation: rapidly growing heights in column order."""
    n = len(conf)
    base = 3
    while True:
        try:
            return regular_triangulation(conf, [base ** j for j in range(n)])
        except InputError:
            base += 1


# ------------------------------------------------------------------- flips


def _circuit(conf: VectorConfig, idx: Sequence[int]) -> tuple[frozenset, frozenset] | None:
    """Signed circuit (positive part, negative part) supported inside ``idx``."""
    m = [[conf.vectors[j][i] for j in idx] for i in range(conf.rank)]
    ns = nullspace_basis(m)
    if ns.cols != 1:
        return None
    lam = ns.col(0)
    pos = frozenset(j for j, v in zip(idx, lam) if v > 0)
    neg = frozenset(j for j, v in zip(idx, lam) if v < 0)
    return pos, neg


def flips(conf: VectorConfig, t: Triangulation):
    """Yield every triangulation obtained from ``t`` by one bistellar flip.

    Candidate circuits are those inside ``sigma + {j}`` for a cell ``sigma``
    and a vector ``j`` outside it; the cell misses ``j``, so ``t`` can only
    contain the half of the circuit's triangulations indexed by ``j``'s sign.
    """
    cells = t.simplices
    seen = set()
    for sigma in sorted(cells):
        for j in range(len(conf)):
            if j in sigma:
                continue
            z = _circuit(conf, sorted(sigma + (j,)))
            if z is None:
                continue
            pos, neg = z
            side, other = (pos, neg) if j in pos else (neg, pos)
            zset = pos | neg
            key = (zset, side)
            if key in seen or not other:
                continue
            seen.add(key)
            links = []
            for zz in side:
                rho = zset - {zz}
                links.append(frozenset(frozenset(c) - rho for c in cells if rho <= frozenset(c)))
            if not links[0] or any(lk != links[0] for lk in links):
                continue
            remove = {tuple(sorted((zset - {zz}) | lk)) for zz in side for lk in links[0]}
            add = {tuple(sorted((zset - {zz}) | lk)) for zz in other for lk in links[0]}
            yield Triangulation(frozenset((cells - remove) | add))


def enumerate_regular_triangulations(conf: VectorConfig, seed: Triangulation | None = None,
                                     stats: dict | None = None) -> list[Triangulation]:
    """All regular triangulations, by flips between regular triangulations from a seed."""
    seed = seed or seed_triangulation(conf)
    found = {seed.simplices: seed}
    queue = deque([seed])
    non_regular = 0
    checked = set()
    while queue:
        t = queue.popleft()
        for nt in flips(conf, t):
            if nt.simplices in found or nt.simplices in checked:
                continue
            checked.add(nt.simplices)
            try:
                regular = is_regular(conf, nt)
            except InputError:
                regular = False
            if regular:
                found[nt.simplices] = nt
                queue.append(nt)
            else:
                non_regular += 1
    if stats is not None:
        stats["non_regular_reached"] = non_regular
    return sorted(found.values(), key=lambda tr: tr.key)


def complement_map(t: Triangulation, n: int) -> frozenset[Simplex]:
    """Complements of the simplices of ``t``: a chamber signature of B."""
    everything = frozenset(range(n))
    return frozenset(tuple(sorted(everything - set(s))) for s in t.simplices)


def triangulation_of_signature(signature: Iterable[Sequence[int]], n: int) -> Triangulation:
    everything = frozenset(range(n))
    return Triangulation(frozenset(tuple(sorted(everything - set(b))) for b in signature))
