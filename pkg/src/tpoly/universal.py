"""Linear constraints satisfied by triangulation incidence vectors of a rank-2 configuration.

Coordinates are indexed by 2-subsets of the vectors.  Every triangulation
of a totally cyclic configuration in the plane satisfies

* ``x_s = 0`` when the pair ``s`` does not span the plane,
* for each vector ``i``, the used cones on its two sides balance:
  ``sum(x_ij, det(a_i, a_j) > 0) = sum(x_ij, det(a_i, a_j) < 0)``,
* for each open angular sector between consecutive rays, exactly one used
  cone covers it.

Optimising the all-ones functional over the LP relaxation bounds the number
of simplices, hence the number of vertices of the corresponding polytopes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

from .gale import Triangulation, VectorConfig
from .linalg import LpProblem, Optimal, RatMatrix, Unbounded, rank, simplex_solve
from .models import InputError


class UnsupportedCorank(InputError):
    """Only rank-2 Gale configurations are handled."""


def _det(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def _half(v) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _angle_cmp(u, v) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    d = _det(u, v)
    return -1 if d > 0 else (1 if d < 0 else 0)


@dataclass
class UniversalSystem:
    pairs: list[tuple[int, int]]
    zeros: list[tuple[int, int]] = field(default_factory=list)
    balance: list[dict[tuple[int, int], int]] = field(default_factory=list)
    covering: list[dict[tuple[int, int], int]] = field(default_factory=list)

    def equations(self) -> list[tuple[dict[tuple[int, int], int], int]]:
        eqs = [({s: 1}, 0) for s in self.zeros]
        eqs += [(row, 0) for row in self.balance]
        eqs += [(row, 1) for row in self.covering]
        return eqs

    def matrix(self) -> tuple[list[list[int]], list[int]]:
        index = {s: i for i, s in enumerate(self.pairs)}
        a, b = [], []
        for row, rhs in self.equations():
            line = [0] * len(self.pairs)
            for s, v in row.items():
                line[index[s]] += v
            a.append(line)
            b.append(rhs)
        return a, b

    def satisfied_by(self, x: dict[tuple[int, int], int]) -> bool:
        return all(sum(v * x.get(s, 0) for s, v in row.items()) == rhs for row, rhs in self.equations())


def build_universal_constraints(conf: VectorConfig) -> UniversalSystem:
    if conf.rank != 2:
        raise UnsupportedCorank("universal constraints are implemented for rank-2 configurations, got rank %d"
                                % conf.rank)
    vecs = conf.vectors
    if any(v == (0, 0) for v in vecs):
        raise InputError("zero vector in configuration")
    n = len(vecs)
    pairs = list(itertools.combinations(range(n), 2))
    u = UniversalSystem(pairs)
    u.zeros = [(i, j) for i, j in pairs if _det(vecs[i], vecs[j]) == 0]
    for i in range(n):
        row: dict[tuple[int, int], int] = {}
        for j in range(n):
            if j == i:
                continue
            d = _det(vecs[i], vecs[j])
            if d:
                row[(min(i, j), max(i, j))] = 1 if d > 0 else -1
        u.balance.append(row)
    # one ray per direction, in counter-clockwise order
    rays: list[tuple[int, int]] = []
    for v in sorted(vecs, key=cmp_to_key(_angle_cmp)):
        if not rays or _angle_cmp(rays[-1], v) != 0:
            rays.append(v)
    for t in range(len(rays)):
        a, b = rays[t], rays[(t + 1) % len(rays)]
        d = _det(a, b)
        if d > 0:
            probe = (a[0] + b[0], a[1] + b[1])
        elif d == 0 and (a[0] * b[0] + a[1] * b[1]) < 0:
            probe = (-a[1], a[0])
        else:
            raise InputError("configuration is not totally cyclic: a sector of angle > pi")
        row = {}
        for i, j in pairs:
            dij = _det(vecs[i], vecs[j])
            if dij == 0:
                continue
            # probe = alpha a_i + beta a_j with alpha, beta > 0
            alpha = Fraction(_det(probe, vecs[j]), dij)
            beta = Fraction(_det(vecs[i], probe), dij)
            if alpha > 0 and beta > 0:
                row[(i, j)] = 1
        u.covering.append(row)
    return u


def incidence_vector(t: Triangulation) -> dict[tuple[int, int], int]:
    return {tuple(sorted(s)): 1 for s in t.simplices}


def _lp(u: UniversalSystem, sense: str) -> Fraction:
    a, b = u.matrix()
    res = simplex_solve(LpProblem(RatMatrix.from_rows(a, cols=len(u.pairs)), b, [1] * len(u.pairs), sense))
    if not isinstance(res, Optimal):
        raise RuntimeError("universal relaxation is %s" % type(res).__name__)
    return res.value


def vertex_count_bounds(u: UniversalSystem) -> tuple[Fraction, Fraction]:
    """Exact minimum and maximum of the all-ones functional over the LP relaxation."""
    return _lp(u, "min"), _lp(u, "max")


def solution_dimension(u: UniversalSystem) -> int:
    """Affine dimension of {x >= 0 : equalities}."""
    a, b = u.matrix()
    n = len(u.pairs)
    free = []
    for k in range(n):
        res = simplex_solve(LpProblem(RatMatrix.from_rows(a, cols=n), b, [int(i == k) for i in range(n)], "max"))
        if isinstance(res, Unbounded) or (isinstance(res, Optimal) and res.value > 0):
            free.append(k)
    if not free:
        return 0
    return len(free) - rank([[row[k] for k in free] for row in a])
