"""Chambers of cone(B): enumeration by crossing walls, with exact certificates.

Every basis ``b`` of B contributes the simplicial cone ``cone(b)``; the rows of
``B_b^{-1}`` are normals of its facets.  The chamber containing a generic
point ``c`` is determined by its *signature*, the set of bases whose cone
contains ``c`` in its interior, and equals the intersection of those open
cones.  So a candidate signature is a chamber exactly when some point
strictly inside all of its walls has that very signature; both directions of
this test are decided with integer arithmetic.

Neighbouring chambers are found combinatorially.  If ``H`` is a facet of a
chamber with signature ``S``, the cones of ``S`` having a facet on ``H`` are
exactly ``Z0 x C+`` (the ``(r-1)``-sets spanning ``H`` extended by every
column strictly on the chamber's side), and crossing ``H`` swaps them for
``Z0 x C-``.  Walls failing that product test are not facets and are skipped.
Floating point is used only to propose well-centred interior points; every
proposal is re-checked exactly and an exact LP takes over when it fails.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .linalg import fraction_str, inverse, nullspace_basis, primitive, solve_square, strictly_feasible_point
from .models import ConstraintSystem, DegenerateRHS, Family, InputError, build_system

log = logging.getLogger(__name__)

Basis = tuple[int, ...]


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(r) for r in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k]), None)
        if p is None:
            return 0
        if p != k:
            a[k], a[p] = a[p], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            a[i] = [(akk * row_i[j] - aik * row_k[j]) // prev if j > k else 0 for j in range(n)]
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


def integer_gale(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Rows of an integer Gale transform: primitive integer vectors spanning ker B."""
    ns = nullspace_basis(rows) if rows else None
    if ns is None:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    return [primitive(ns.col(j)) for j in range(ns.cols)]


def positive_dependency(vectors: Sequence[Sequence[int]]) -> bool:
    """True when the vectors have a one-dimensional dependency space spanned by a
    nonnegative combination, which then certifies that no point is strictly
    positive on all of them."""
    ns = nullspace_basis([list(col) for col in zip(*vectors)])
    if ns.cols != 1:
        return False
    lam = ns.col(0)
    return all(v >= 0 for v in lam) or all(v <= 0 for v in lam)


def signature_hash(bases: Iterable[Basis]) -> str:
    payload = json.dumps(sorted(list(b) for b in bases), separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Chamber:
    """One chamber: an integer representative and the bases containing it."""

    representative: tuple[int, ...]  # in the coordinates of the independent rows of B
    signature: frozenset[Basis]
    marginals: tuple[Fraction, ...] = field(default=(), compare=False)  # full right-hand side

    @property
    def cardinality(self) -> int:
        return len(self.signature)

    @property
    def key(self) -> tuple[Basis, ...]:
        return tuple(sorted(self.signature))

    @property
    def hash(self) -> str:
        return signature_hash(self.signature)


class ChamberComplex:
    """Bases, spanned hyperplanes and signature bookkeeping for one constraint matrix."""

    def __init__(self, family_or_system: Family | ConstraintSystem):
        sys = family_or_system if isinstance(family_or_system, ConstraintSystem) else build_system(family_or_system)
        self.system = sys
        self.family = sys.family
        self.row_ids = sys.independent_rows
        self.rows = [sys.matrix[i] for i in self.row_ids]
        self.r = len(self.rows)
        self.n = sys.num_columns
        self.B = np.array(self.rows, dtype=np.int64).reshape(self.r, self.n)
        self.gale = integer_gale(self.rows, self.n)
        self._expand = self._row_expansion()
        self._find_bases()
        self._find_hyperplanes()
        # functional equal to 1 on every column, positive on cone(B) minus the origin
        b0 = [list(row) for row in self.B[:, list(self.bases[0])].T.tolist()]
        self.total_int = primitive(solve_square(b0, [1] * self.r))
        self.total = np.array(self.total_int, dtype=float)

    # ------------------------------------------------------------- setup

    def _row_expansion(self) -> list[list[Fraction]]:
        """Coefficients writing every row of B in terms of the independent rows."""
        rows = self.rows
        gram = [[sum(a * b for a, b in zip(ri, rj)) for rj in rows] for ri in rows]
        ginv = inverse(gram)
        out = []
        for full in self.system.matrix:
            rhs = [sum(a * b for a, b in zip(full, ri)) for ri in rows]
            out.append([sum((g * v for g, v in zip(grow, rhs)), Fraction(0)) for grow in ginv])
        return out

    def full_rhs(self, p: Sequence) -> tuple[Fraction, ...]:
        """Right-hand side over all rows of B for a point given on the independent rows."""
        return tuple(sum((Fraction(a) * int(v) for a, v in zip(coef, p)), Fraction(0)) for coef in self._expand)

    def _find_bases(self) -> None:
        r, n = self.r, self.n
        k = n - r
        gale = self.gale
        bases = []
        for comp in itertools.combinations(range(n), k):
            if k == 0 or int_det([[g[j] for j in comp] for g in gale]) != 0:
                cs = set(comp)
                bases.append(tuple(j for j in range(n) if j not in cs))
        bases.sort()
        self.bases: list[Basis] = bases
        self.basis_index = {b: i for i, b in enumerate(bases)}
        self.colmask = [sum(1 << j for j in b) for b in bases]
        self.mask_index = {m: i for i, m in enumerate(self.colmask)}
        nb = len(bases)
        mats = np.stack([self.B[:, list(b)] for b in bases]).astype(np.int64) if nb else np.zeros((0, r, r), np.int64)
        det = np.rint(np.linalg.det(mats.astype(float))).astype(np.int64)
        adj = np.rint(np.linalg.inv(mats.astype(float)) * det[:, None, None]).astype(np.int64)
        ident = np.eye(r, dtype=np.int64)
        bad = [i for i in range(nb) if det[i] == 0 or not np.array_equal(mats[i] @ adj[i], det[i] * ident)]
        for i in bad:
            sub = [[int(v) for v in row] for row in mats[i]]
            d = int_det(sub)
            inv = inverse(sub)
            det[i] = d
            adj[i] = np.array([[int(v * d) for v in row] for row in inv], dtype=np.int64)
            assert np.array_equal(mats[i] @ adj[i], d * ident)
        self.det = det
        self.adj = adj  # adj[i] = det[i] * B_b^{-1}

    def _find_hyperplanes(self) -> None:
        nb, r = len(self.bases), self.r
        normals = self.adj.reshape(nb * r, r)
        g = np.gcd.reduce(np.abs(normals), axis=1)
        prim = normals // g[:, None]
        lead = prim[np.arange(len(prim)), np.argmax(prim != 0, axis=1)]
        flip = np.where(lead < 0, -1, 1)
        prim = prim * flip[:, None]
        hyper, inv = np.unique(prim, axis=0, return_inverse=True)
        self.hyperplanes = hyper.astype(np.int64)
        self.facet_h = inv.reshape(nb, r)
        # x_i = adj_i . c / det = flip * g * (h . c) / det
        self.facet_s = (flip * np.sign(self.det).repeat(r)).reshape(nb, r).astype(np.int64)
        self.col_side = np.sign(self.hyperplanes @ self.B).astype(np.int8)
        self.facet_bases: list[list[tuple[int, int]]] = [[] for _ in range(len(hyper))]
        for b, basis in enumerate(self.bases):
            for pos, h in enumerate(self.facet_h[b]):
                self.facet_bases[h].append((b, basis[pos]))

    # --------------------------------------------------------- point tests

    def _as_array(self, p: Sequence) -> np.ndarray:
        vals = [int(v) for v in p]
        bound = max(1, max(abs(v) for v in vals)) * int(np.abs(self.hyperplanes).max(initial=1)) * self.r
        return np.array(vals, dtype=np.int64 if bound < 2 ** 62 else object)

    def signs(self, p: Sequence) -> np.ndarray:
        return np.sign(self.hyperplanes @ self._as_array(p)).astype(np.int64)

    def basis_signs(self, p: Sequence) -> np.ndarray:
        """Sign of every basic coordinate of every basis at ``p`` (shape: bases x rank)."""
        return self.facet_s * self.signs(p)[self.facet_h]

    def signature_of(self, p: Sequence) -> frozenset[int] | None:
        """Indices of bases containing ``p`` in their open cone; ``None`` if ``p`` lies on a wall."""
        vals = self.basis_signs(p)
        nonneg = np.all(vals >= 0, axis=1)
        if np.any(nonneg & np.any(vals == 0, axis=1)):
            return None
        return frozenset(np.flatnonzero(nonneg).tolist())

    def walls(self, sig: Iterable[int]) -> list[tuple[int, int]]:
        """Distinct oriented hyperplanes (h, s) bounding the cones of a signature."""
        idx = np.fromiter(sig, dtype=np.int64)
        pairs = np.stack([self.facet_h[idx].ravel(), self.facet_s[idx].ravel()], axis=1)
        return [tuple(map(int, w)) for w in np.unique(pairs, axis=0)]

    def wall_matrix(self, walls: Sequence[tuple[int, int]]) -> np.ndarray:
        hs = np.array([h for h, _ in walls], dtype=np.int64)
        ss = np.array([s for _, s in walls], dtype=np.int64)
        return self.hyperplanes[hs] * ss[:, None]

    # ------------------------------------------------------ interior points

    def _rounded_points(self, x: np.ndarray):
        x = x / np.abs(x).max()
        for bits in (4, 7, 10, 14, 18, 24, 30, 38, 46):
            yield np.rint(x * (1 << bits)).astype(np.int64)

    def interior_point(self, sig: frozenset[int], walls=None) -> tuple[int, ...] | None:
        """A small integer point whose signature is exactly ``sig``, or ``None`` if ``sig`` is no chamber."""
        walls = self.walls(sig) if walls is None else walls
        G = self.wall_matrix(walls)
        norms = np.linalg.norm(G, axis=1)
        K, r = G.shape
        # maximise t subject to G x >= t |G_i|, total(x) = 1, t <= 1
        cobj = np.zeros(r + 1)
        cobj[-1] = -1.0
        A_ub = np.hstack([-G.astype(float), norms[:, None]])
        res = linprog(cobj, A_ub=A_ub, b_ub=np.zeros(K), A_eq=np.append(self.total, 0.0)[None, :], b_eq=[1.0],
                      bounds=[(None, None)] * r + [(None, 1.0)], method="highs")
        if res.status == 0 and res.x[-1] > 1e-9:
            for p in self._rounded_points(res.x[:r]):
                if np.all(G @ p > 0):
                    # p is inside every cone of sig; a chamber would have to be exactly this set
                    return tuple(int(v) for v in p) if self.signature_of(p) == sig else None
        elif res.status == 0:
            # the dual names a few walls that cannot all be positive on cone(B); prove that exactly
            lam = -np.asarray(res.ineqlin.marginals)
            support = np.flatnonzero(lam > 1e-9 * max(lam.max(), 1e-300))
            rows = G[support].tolist() + [list(self.total_int)]
            if len(support) and (positive_dependency(rows) or strictly_feasible_point(rows) is None):
                return None
        return self._exact_interior_point(sig, G)

    def _exact_interior_point(self, sig: frozenset[int], G: np.ndarray) -> tuple[int, ...] | None:
        y = strictly_feasible_point(G.tolist())
        if y is None:
            return None
        p = primitive(y)
        if self.signature_of(p) != sig:
            return None
        return p

    # ------------------------------------------------------------ crossings

    def crossings(self, sig: frozenset[int], walls=None):
        """Yield ``(wall, new signature)`` for every wall passing the facet product test."""
        walls = self.walls(sig) if walls is None else walls
        for h, s in walls:
            side = self.col_side[h] * s
            n_plus = int(np.count_nonzero(side > 0))
            minus = np.flatnonzero(side < 0).tolist()
            z = [(b, v) for b, v in self.facet_bases[h] if b in sig]
            z0 = {self.colmask[b] & ~(1 << v) for b, v in z}
            if len(z) != len(z0) * n_plus or not minus:
                continue
            removed = {b for b, _ in z}
            added = {self.mask_index[m | (1 << u)] for m in z0 for u in minus}
            yield (h, s), (sig - removed) | added

    def generic_point(self, rng: random.Random) -> tuple[int, ...]:
        for _ in range(1000):
            w = [rng.randint(1, 10 ** 6) for _ in range(self.n)]
            p = tuple(int(v) for v in self.B @ np.array(w, dtype=np.int64))
            if self.signature_of(p) is not None:
                return p
        raise RuntimeError("could not find a generic point")

    def chamber(self, p: Sequence, sig: frozenset[int] | None = None) -> Chamber:
        sig = self.signature_of(p) if sig is None else sig
        return Chamber(tuple(int(v) for v in p), frozenset(self.bases[i] for i in sig), self.full_rhs(p))


def enumerate_chambers(sys_or_family: ConstraintSystem | Family, seed: int = 0, complex_: ChamberComplex | None = None,
                       progress=None) -> list[Chamber]:
    """All chambers of cone(B), sorted by signature."""
    cx = complex_ or ChamberComplex(sys_or_family)
    rng = random.Random(seed)
    start = cx.generic_point(rng)
    sig0 = cx.signature_of(start)
    rep0 = cx.interior_point(sig0) or start
    found: dict[frozenset, tuple[int, ...]] = {sig0: rep0}
    rejected: set[frozenset] = set()
    queue = deque([sig0])
    while queue:
        sig = queue.popleft()
        walls = cx.walls(sig)
        for _, new in cx.crossings(sig, walls):
            if new in found or new in rejected:
                continue
            p = cx.interior_point(new)
            if p is None:
                rejected.add(new)
                continue
            found[new] = p
            queue.append(new)
            if progress is not None and len(found) % 1000 == 0:
                progress(len(found))
    chambers = [cx.chamber(p, sig) for sig, p in found.items()]
    chambers.sort(key=lambda ch: ch.key)
    return chambers


def chamber_of(sys: ConstraintSystem, complex_: ChamberComplex | None = None) -> Chamber:
    """The chamber containing the right-hand side of ``sys``."""
    cx = complex_ or ChamberComplex(sys)
    c = [sys.c[i] for i in cx.row_ids]
    den = 1
    for v in c:
        den = den * v.denominator // gcd(den, v.denominator)
    p = [int(v * den) for v in c]
    if list(cx.full_rhs(p)) != [v * den for v in sys.c]:
        raise InputError("right-hand side is inconsistent with the row dependencies of B")
    sig = cx.signature_of(p)
    if sig is None:
        raise DegenerateRHS("right-hand side lies on a wall of the chamber complex")
    if not sig:
        raise DegenerateRHS("right-hand side lies outside cone(B)")
    return Chamber(tuple(p), frozenset(cx.bases[i] for i in sig), tuple(sys.c))


# ------------------------------------------------------------------ symmetry


def symmetry_group(f: Family) -> list[tuple[int, ...]]:
    """Column permutations induced by relabelling indices within each axis and
    by exchanging axes of equal length; all of them preserve B up to a row
    permutation."""
    shape = f.shape
    cells = f.cells
    index = {c: j for j, c in enumerate(cells)}
    axis_perms = [list(itertools.permutations(range(1, s + 1))) for s in shape]
    swaps = [p for p in itertools.permutations(range(len(shape)))
             if all(shape[p[a]] == shape[a] for a in range(len(shape)))]
    group = set()
    for swap in swaps:
        for relabel in itertools.product(*axis_perms):
            perm = []
            for c in cells:
                moved = tuple(relabel[a][c[swap[a]] - 1] for a in range(len(shape)))
                perm.append(index[moved])
            group.add(tuple(perm))
    return sorted(group)


class _BasisAction:
    """The symmetry group acting on basis indices, with canonical forms of signatures."""

    def __init__(self, cx: ChamberComplex, group: Sequence[Sequence[int]]):
        self.order = len(group)
        table = np.empty((len(group), len(cx.bases)), dtype=np.int64)
        for g, perm in enumerate(group):
            for b, basis in enumerate(cx.bases):
                mask = 0
                for j in basis:
                    mask |= 1 << perm[j]
                table[g, b] = cx.mask_index[mask]
        self.table = table

    def canonical(self, sig: Iterable[int]) -> tuple[tuple[int, ...], int]:
        """Lexicographically least image and the orbit size."""
        idx = np.fromiter(sig, dtype=np.int64)
        images = np.sort(self.table[:, idx], axis=1)
        order = np.lexsort(images.T[::-1])
        best = images[order[0]]
        stab = int(np.count_nonzero(np.all(images == best, axis=1)))
        return tuple(best.tolist()), self.order // stab


def enumerate_chamber_orbits(sys_or_family: ConstraintSystem | Family, seed: int = 0,
                             complex_: ChamberComplex | None = None,
                             progress=None) -> list[tuple[Chamber, int]]:
    """One chamber per orbit of the symmetry group, with the orbit size.

    The orbit sizes add up to the number of chambers found by
    :func:`enumerate_chambers`.
    """
    cx = complex_ or ChamberComplex(sys_or_family)
    action = _BasisAction(cx, symmetry_group(cx.family))
    rng = random.Random(seed)
    start = cx.generic_point(rng)
    sig0 = cx.signature_of(start)
    rep0 = cx.interior_point(sig0) or start
    key0, size0 = action.canonical(sig0)
    found: dict[tuple, tuple[frozenset, tuple[int, ...], int]] = {key0: (sig0, rep0, size0)}
    rejected: set[tuple] = set()
    queue = deque([sig0])
    while queue:
        sig = queue.popleft()
        for _, new in cx.crossings(sig):
            key, size = action.canonical(new)
            if key in found or key in rejected:
                continue
            p = cx.interior_point(new)
            if p is None:
                rejected.add(key)
                continue
            found[key] = (new, p, size)
            queue.append(new)
            if progress is not None and len(found) % 1000 == 0:
                progress(len(found))
    out = [(cx.chamber(p, sig), size) for sig, p, size in found.values()]
    out.sort(key=lambda item: item[0].key)
    return out
