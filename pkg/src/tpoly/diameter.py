"""Explicit short paths to the well-ordered vertex of an axial 3-way polytope.

A vertex is *well-ordered* when its support is a monotone staircase from
(1,1,1) to (l,m,n); for generic marginals there is exactly one, produced by
the northwest corner rule.  Any vertex is first moved to one containing
(l,m,n); then the level at which it starts to be well-ordered is lowered one
unit at a time, each time emptying one of the three boundary sets S1, S2, S3
of the current box and inserting the next staircase cell.

Every step is an actual edge of the polytope: consecutive points differ along
a one-dimensional face, checked with the nullity of the columns in the union
of their supports.  Ties that the construction needs to be strict raise
NonGenericMarginals; :func:`perturb_marginals` is the explicit opt-in way out.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence

from .linalg import fraction_str, nullspace_basis, rank, solve_square
from .models import Family, InputError, Marginals, _check_consistent, build_system
from .vertices import Vertex

Cell = tuple[int, int, int]
Point = tuple[Fraction, ...]


class NonGenericMarginals(InputError):
    """A strict inequality required by the path construction fails."""


def _leq(a: Cell, b: Cell) -> bool:
    return a[0] <= b[0] and a[1] <= b[1] and a[2] <= b[2]


def _meet(a: Cell, b: Cell) -> Cell:
    return (min(a[0], b[0]), min(a[1], b[1]), min(a[2], b[2]))


def is_staircase(cells: Iterable[Cell]) -> bool:
    """Totally ordered under the coordinate-wise order, one cell per index sum, unit steps."""
    cs = sorted(cells, key=sum)
    if not cs or cs[0] != (1, 1, 1):
        return False
    return all(sum(b) - sum(a) == 1 and _leq(a, b) for a, b in zip(cs, cs[1:]))


class AxialPolytope:
    """An axial polytope with the exact primitives the path construction needs."""

    def __init__(self, marginals: Marginals):
        f = marginals.family
        if f.kind != "axial":
            raise InputError("expected axial marginals, got %s" % f)
        _check_consistent(marginals)
        self.marginals = marginals
        self.family = f
        self.shape: Cell = f.shape
        self.system = build_system(f, marginals)
        self.rows, self.c = self.system.reduced()
        self.rank = len(self.rows)
        self.cells: tuple[Cell, ...] = f.cells
        self.col = {c: j for j, c in enumerate(self.cells)}

    # -- points ------------------------------------------------------------

    def point(self, table: dict[Cell, object]) -> Point:
        p = [Fraction(0)] * len(self.cells)
        for c, v in table.items():
            p[self.col[tuple(c)]] = Fraction(v)
        return tuple(p)

    def support(self, p: Point) -> frozenset[Cell]:
        return frozenset(self.cells[j] for j, v in enumerate(p) if v)

    def table(self, p: Point) -> dict[Cell, Fraction]:
        return {self.cells[j]: v for j, v in enumerate(p) if v}

    def vertex(self, p: Point) -> Vertex:
        supp = tuple(sorted(j for j, v in enumerate(p) if v))
        bases = frozenset([supp]) if len(supp) == self.rank else frozenset()
        return Vertex(p, bases, self.cells)

    def _nullity(self, cells: Iterable[Cell]) -> int:
        cols = [self.col[c] for c in cells]
        return len(cols) - rank([[row[j] for j in cols] for row in self.rows]) if cols else 0

    def _kernel(self, cells: Sequence[Cell]) -> list[list[Fraction]]:
        cols = [self.col[c] for c in cells]
        ns = nullspace_basis([[row[j] for j in cols] for row in self.rows])
        return [ns.col(k) for k in range(ns.cols)]

    def contains(self, p: Point) -> bool:
        return self.system.check_point(p)

    def is_vertex(self, p: Point) -> bool:
        return self.contains(p) and self._nullity(self.support(p)) == 0

    def is_edge(self, p: Point, q: Point) -> bool:
        """Distinct vertices whose smallest common face is one-dimensional."""
        return (p != q and self.is_vertex(p) and self.is_vertex(q)
                and self._nullity(self.support(p) | self.support(q)) == 1)

    def require_generic_vertex(self, p: Point) -> None:
        if not self.is_vertex(p):
            raise InputError("point is not a vertex of the polytope")
        if len(self.support(p)) != self.rank:
            raise NonGenericMarginals("vertex has %d nonzero entries, expected %d"
                                      % (len(self.support(p)), self.rank))

    # -- moves -------------------------------------------------------------

    def move(self, p: Point, enter: Cell) -> Point:
        """Walk from vertex ``p`` along the edge on which ``enter`` becomes positive."""
        supp = sorted(self.support(p))
        if enter in supp:
            raise ValueError("%r is already in the support" % (enter,))
        cells = supp + [enter]
        ker = self._kernel(cells)
        if len(ker) != 1:
            raise NonGenericMarginals("no unique edge inserting %r" % (enter,))
        d = ker[0]
        d = [v / d[-1] for v in d]
        ratios = [(p[self.col[c]] / -dv, c) for c, dv in zip(cells, d) if dv < 0]
        if not ratios:
            raise InputError("unbounded edge: the polytope is not bounded")
        t = min(r for r, _ in ratios)
        q = list(p)
        for c, dv in zip(cells, d):
            q[self.col[c]] += t * dv
        q = tuple(q)
        if len(self.support(q)) != self.rank:
            raise NonGenericMarginals("tie in the ratio test while inserting %r" % (enter,))
        return q

    def face_polygon(self, cells: Iterable[Cell]) -> list[Point]:
        """Vertices of the 2-face with support in ``cells``, in cyclic order."""
        cells = sorted(set(cells))
        if self._nullity(cells) != 2:
            raise ValueError("support does not span a 2-face")
        pts = set()
        for b in itertools.combinations(cells, self.rank):
            x = solve_square([[row[self.col[c]] for c in b] for row in self.rows], self.c)
            if x is None or any(v < 0 for v in x):
                continue
            pts.add(self.point(dict(zip(b, x))))
        pts = sorted(pts)
        d1, d2 = self._kernel(cells)
        # planar coordinates: solve p - p0 = s d1 + t d2 on two independent entries
        pair = next((i, j) for i, j in itertools.combinations(range(len(cells)), 2)
                    if d1[i] * d2[j] - d1[j] * d2[i] != 0)
        i, j = pair
        det = d1[i] * d2[j] - d1[j] * d2[i]
        p0 = pts[0]

        def coords(p):
            u = p[self.col[cells[i]]] - p0[self.col[cells[i]]]
            v = p[self.col[cells[j]]] - p0[self.col[cells[j]]]
            return ((u * d2[j] - v * d2[i]) / det, (d1[i] * v - d1[j] * u) / det)

        xy = [coords(p) for p in pts]
        cx = sum(a for a, _ in xy) / len(xy)
        cy = sum(b for _, b in xy) / len(xy)

        def half(v):
            return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

        def cmp(a, b):
            va, vb = (a[1][0] - cx, a[1][1] - cy), (b[1][0] - cx, b[1][1] - cy)
            if half(va) != half(vb):
                return half(va) - half(vb)
            cr = va[0] * vb[1] - va[1] * vb[0]
            return -1 if cr > 0 else (1 if cr < 0 else 0)

        return [p for p, _ in sorted(zip(pts, xy), key=cmp_to_key(cmp))]


def _polytope(m: AxialPolytope | Marginals) -> AxialPolytope:
    return m if isinstance(m, AxialPolytope) else AxialPolytope(m)


# --------------------------------------------------------- well-ordered vertex


def northwest_corner_vertex(f: Family, m: Marginals) -> Vertex:
    """The well-ordered vertex, filling (l,m,n) first and peeling the exhausted plane."""
    if f.kind != "axial" or m.family != f:
        raise InputError("northwest corner rule needs axial marginals of %s" % f)
    poly = AxialPolytope(m)
    x, y, z = list(m.x), list(m.y), list(m.z)
    i, j, k = f.shape
    table: dict[Cell, Fraction] = {}
    while True:
        if (i, j, k) == (1, 1, 1):
            table[(1, 1, 1)] = x[0]
            break
        vals = [x[i - 1], y[j - 1], z[k - 1]]
        low = min(vals)
        if vals.count(low) > 1 or low <= 0:
            raise NonGenericMarginals("northwest corner tie at cell %r: %s"
                                      % ((i, j, k), ", ".join(fraction_str(v) for v in vals)))
        table[(i, j, k)] = low
        x[i - 1] -= low
        y[j - 1] -= low
        z[k - 1] -= low
        axis = vals.index(low)
        if axis == 0:
            i -= 1
        elif axis == 1:
            j -= 1
        else:
            k -= 1
    return poly.vertex(poly.point(table))


def well_ordered_vertex(poly: AxialPolytope | Marginals) -> Point:
    poly = _polytope(poly)
    return northwest_corner_vertex(poly.family, poly.marginals).point


def _well_ordered_at(supp: frozenset[Cell], p: int, top: int) -> bool:
    chain = []
    for q in range(p, top + 1):
        level = [c for c in supp if sum(c) == q]
        if len(level) != 1:
            return False
        chain.append(level[0])
    if any(not _leq(a, b) for a, b in zip(chain, chain[1:])):
        return False
    base = chain[0]
    return all(_leq(c, base) for c in supp if sum(c) < p)


def well_ordered_level(v: Vertex | Point, shape: Cell | None = None, cells=None) -> int:
    """Smallest p such that ``v`` is well-ordered starting at level p; l+m+n+1 if none."""
    if isinstance(v, Vertex):
        supp = frozenset(v.support_cells)
        shape = shape or v.cells[-1]
    else:
        supp = frozenset(cells[j] for j, x in enumerate(v) if x)
    top = sum(shape)
    if not _well_ordered_at(supp, top, top):
        return top + 1
    p = top
    while p > 3 and _well_ordered_at(supp, p - 1, top):
        p -= 1
    return p


# -------------------------------------------------------------- level state


@dataclass
class LevelState:
    """Boundary sets of the box below the level-p staircase cell ``alpha``."""

    point: Point
    level: int
    alpha: Cell
    S: tuple[frozenset[Cell], frozenset[Cell], frozenset[Cell]]
    R: dict[str, frozenset[Cell]]

    @property
    def union(self) -> frozenset[Cell]:
        return self.S[0] | self.S[1] | self.S[2]


def level_state(poly: AxialPolytope, p: Point, level: int | None = None) -> LevelState:
    supp = poly.support(p)
    level = level if level is not None else well_ordered_level(p, poly.shape, poly.cells)
    alpha = next(c for c in supp if sum(c) == level)
    box = [c for c in supp if c != alpha and _leq(c, alpha)]
    S = tuple(frozenset(c for c in box if c[a] == alpha[a]) for a in range(3))
    if S[0] & S[1] & S[2]:
        raise AssertionError("a support cell lies on all three boundary planes")
    R = {
        "1": S[0] - S[1] - S[2], "2": S[1] - S[0] - S[2], "3": S[2] - S[0] - S[1],
        "12": S[0] & S[1], "13": S[0] & S[2], "23": S[1] & S[2],
    }
    return LevelState(p, level, alpha, S, R)


# -------------------------------------------------------------------- paths


@dataclass
class PivotPath:
    """Consecutive vertices joined by edges; ``steps[i]`` is (entering, leaving) for edge i."""

    points: list[Point]
    cells: tuple[Cell, ...] = field(repr=False)
    steps: list[tuple[tuple[Cell, ...], tuple[Cell, ...]]] = field(default_factory=list)
    segments: list[tuple[int, int]] = field(default_factory=list)  # (level, edges used)

    def __len__(self) -> int:
        return len(self.points) - 1

    @property
    def length(self) -> int:
        return len(self)

    @property
    def start(self) -> Point:
        return self.points[0]

    @property
    def end(self) -> Point:
        return self.points[-1]

    def vertices(self) -> list[Vertex]:
        return [Vertex(p, frozenset(), self.cells) for p in self.points]

    def append(self, q: Point) -> None:
        before = {self.cells[j] for j, v in enumerate(self.points[-1]) if v}
        after = {self.cells[j] for j, v in enumerate(q) if v}
        self.steps.append((tuple(sorted(after - before)), tuple(sorted(before - after))))
        self.points.append(q)

    def extend(self, other: "PivotPath") -> None:
        if other.points[0] != self.points[-1]:
            raise ValueError("paths do not meet")
        for q in other.points[1:]:
            self.append(q)
        self.segments += other.segments

    def reversed(self) -> "PivotPath":
        out = PivotPath([self.points[-1]], self.cells)
        for q in reversed(self.points[:-1]):
            out.append(q)
        return out

    def to_json(self) -> dict:
        def fmt(c):
            return list(c)
        return {
            "length": len(self),
            "supports": [[fmt(c) for c in sorted(self.cells[j] for j, v in enumerate(p) if v)] for p in self.points],
            "points": [{",".join(map(str, self.cells[j])): fraction_str(v) for j, v in enumerate(p) if v}
                       for p in self.points],
            "steps": [{"entering": [fmt(c) for c in e], "leaving": [fmt(c) for c in l_]} for e, l_ in self.steps],
        }


def _check_edge(poly: AxialPolytope, p: Point, q: Point) -> None:
    if not poly.is_edge(p, q):
        raise AssertionError("constructed step is not an edge of the polytope")


def _value(poly: AxialPolytope, p: Point, c: Cell) -> Fraction:
    return p[poly.col[c]]


def pivot_exchange(poly: AxialPolytope, p: Point, alpha: Cell, beta: Cell, gamma: Cell) -> Point:
    """Move along e_alpha + e_delta - e_beta - e_gamma, delta the index-wise minimum of beta, gamma.

    ``alpha`` must be the index-wise maximum.  Whichever of beta, gamma is
    smaller leaves and delta enters.
    """
    delta = _meet(beta, gamma)
    top = tuple(max(a, b) for a, b in zip(beta, gamma))
    if top != alpha:
        raise ValueError("alpha is not the index-wise maximum of beta and gamma")
    if _value(poly, p, delta) != 0:
        raise AssertionError("delta %r is already in the support" % (delta,))
    ab, ag = _value(poly, p, beta), _value(poly, p, gamma)
    if ab == ag:
        raise NonGenericMarginals("equal entries at %r and %r" % (beta, gamma))
    t = min(ab, ag)
    q = list(p)
    for c, s in ((alpha, 1), (delta, 1), (beta, -1), (gamma, -1)):
        q[poly.col[c]] += s * t
    return tuple(q)


def case3_step(poly: AxialPolytope, p: Point, alpha: Cell, beta: Cell, gamma: Cell,
               delta: Cell) -> list[Point]:
    """Vertices visited (after ``p``) when beta in R1, gamma in R2, delta in R3 are all present.

    Returns the walk to a vertex where one of beta, gamma, delta has left the
    support, going around the 2-face spanned by support(p) + {eps1, eps2}
    when the six-entry move does not land on a vertex.
    """
    j1, k1 = beta[1], beta[2]
    i2, k2 = gamma[0], gamma[2]
    i3, j3 = delta[0], delta[1]
    eps1, eps2 = (i2, j1, k1), (i3, j3, k2)
    vals = [_value(poly, p, c) for c in (beta, gamma, delta)]
    t = min(vals)
    if vals.count(t) > 1:
        raise NonGenericMarginals("smallest of the entries at beta, gamma, delta is not unique")
    w = list(p)
    for c, s in ((alpha, 1), (beta, -1), (gamma, -1), (delta, -1), (eps1, 1), (eps2, 1)):
        w[poly.col[c]] += s * t
    w = tuple(w)
    supp = poly.support(p)
    if eps1 == eps2 or eps1 in supp or eps2 in supp:
        if not poly.is_vertex(w):
            raise AssertionError("six-entry move did not reach a vertex")
        return [w]
    poly_cells = supp | {eps1, eps2}
    ring = poly.face_polygon(poly_cells)
    k = len(ring)
    if k > 8:
        raise AssertionError("2-face has %d edges, more than eight" % k)
    at = ring.index(p)
    ring = ring[at:] + ring[:at]  # ring[0] is p

    def walk(idx: int) -> list[Point]:
        if idx <= k - idx:
            return ring[1:idx + 1]
        return list(reversed(ring[idx:]))

    def dist(idx: int) -> int:
        return min(idx, k - idx)

    if k <= 5:
        # the edge of the face containing w, and its endpoint nearer to p
        if w in ring:
            return walk(ring.index(w))
        for a in range(k):
            b = (a + 1) % k
            if _on_segment(ring[a], ring[b], w):
                best = min((dist(a), ring[a], a), (dist(b), ring[b], b))
                return walk(best[2])
        raise AssertionError("six-entry move left the 2-face")
    # six or more edges: the two vertices at distance two
    wanted = {beta, gamma, delta}
    for idx in sorted((2, k - 2), key=lambda i: ring[i]):
        for nb in ((idx - 1) % k, (idx + 1) % k):
            if any(_value(poly, ring[idx], c) == 0 and _value(poly, ring[nb], c) == 0 for c in wanted):
                return walk(idx)
    raise AssertionError("no vertex at distance two lies on an edge of beta, gamma or delta")


def _on_segment(a: Point, b: Point, w: Point) -> bool:
    t = None
    for x, y, z in zip(a, b, w):
        if x == y:
            if z != x:
                return False
            continue
        s = (z - x) / (y - x)
        if t is None:
            t = s
        elif s != t:
            return False
    return t is not None and 0 <= t <= 1


def _first(cells: Iterable[Cell]) -> Cell:
    return min(cells)


def empty_some_boundary(poly: AxialPolytope, p: Point, level: int) -> list[Point]:
    """Pivots that empty one of S1, S2, S3 at the given level; returns the visited vertices."""
    out: list[Point] = []
    while True:
        st = level_state(poly, p, level)
        if not all(st.S):
            return out
        R, alpha = st.R, st.alpha
        before = len(st.union)
        step: list[Point]
        decreasing = True
        pair = next(((R[jk], R[i]) for i, jk in (("3", "12"), ("2", "13"), ("1", "23")) if R[i] and R[jk]), None)
        if pair:
            step = [pivot_exchange(poly, p, alpha, _first(pair[0]), _first(pair[1]))]
        elif R["12"] and R["13"] and R["23"]:
            step = [pivot_exchange(poly, p, alpha, _first(R["13"]), _first(R["23"]))]
            decreasing = False
        elif R["1"] and R["2"] and R["3"]:
            step = case3_step(poly, p, alpha, _first(R["1"]), _first(R["2"]), _first(R["3"]))
        else:
            # all of S1 u S2 u S3 lies in one S_a: pivot two of its shared parts together
            pairs = [("12", "13"), ("12", "23"), ("13", "23")]
            a, b = next((a, b) for a, b in pairs if R[a] and R[b])
            step = [pivot_exchange(poly, p, alpha, _first(R[a]), _first(R[b]))]
            decreasing = False
        for q in step:
            _check_edge(poly, p, q)
            out.append(q)
            p = q
        after = len(level_state(poly, p, level).union)
        if decreasing and after >= before:
            raise AssertionError("boundary union did not shrink")


def decrease_level(poly: AxialPolytope | Marginals, v: Vertex | Point) -> PivotPath:
    """Path from a vertex well-ordered at level p >= 5 to one well-ordered at level p - 1."""
    poly = _polytope(poly)
    p = v.point if isinstance(v, Vertex) else tuple(v)
    poly.require_generic_vertex(p)
    level = well_ordered_level(p, poly.shape, poly.cells)
    if level > sum(poly.shape):
        raise InputError("vertex does not contain (l,m,n)")
    if level < 5:
        raise InputError("vertex is already well-ordered at level %d" % level)
    path = PivotPath([p], poly.cells)
    for q in empty_some_boundary(poly, p, level):
        path.append(q)
    cur = path.end
    st = level_state(poly, cur, level)
    alpha = st.alpha
    a = next(a for a in range(3) if not st.S[a] and alpha[a] > 1)
    target = tuple(alpha[b] - (b == a) for b in range(3))
    if _value(poly, cur, target) == 0:
        q = poly.move(cur, target)
        _check_edge(poly, cur, q)
        path.append(q)
    new_level = well_ordered_level(path.end, poly.shape, poly.cells)
    if new_level > level - 1:
        raise AssertionError("closing pivot did not lower the level")
    path.segments.append((level, len(path)))
    return path


def path_to_well_ordered(poly: AxialPolytope | Marginals, v: Vertex | Point) -> PivotPath:
    """Path from ``v`` to the well-ordered vertex of length at most (l+m+n-3)^2."""
    poly = _polytope(poly)
    p = v.point if isinstance(v, Vertex) else tuple(v)
    poly.require_generic_vertex(p)
    top = poly.shape
    path = PivotPath([p], poly.cells)
    if _value(poly, p, top) == 0:
        q = poly.move(p, top)
        _check_edge(poly, p, q)
        path.append(q)
    while well_ordered_level(path.end, poly.shape, poly.cells) >= 5:
        path.extend(decrease_level(poly, path.end))
    target = well_ordered_vertex(poly)
    if path.end != target:
        raise AssertionError("path ended at a vertex other than the well-ordered one")
    return path


def path_between(poly: AxialPolytope | Marginals, u: Vertex | Point, v: Vertex | Point) -> PivotPath:
    """``u`` to the well-ordered vertex, then back out to ``v``; at most 2(l+m+n-3)^2 edges."""
    poly = _polytope(poly)
    pu = u.point if isinstance(u, Vertex) else tuple(u)
    pv = v.point if isinstance(v, Vertex) else tuple(v)
    for q in (pu, pv):
        if len(q) != len(poly.cells) or not poly.contains(q):
            raise InputError("vertex does not belong to this polytope")
    if pu == pv:
        return PivotPath([pu], poly.cells)
    first = path_to_well_ordered(poly, pu)
    second = path_to_well_ordered(poly, pv).reversed()
    first.extend(second)
    return first


def path_length_bound(shape: Cell) -> int:
    """1 + 2 * C(p-3, 2) with p = l+m+n, the edge budget of the construction."""
    p = sum(shape)
    return 1 + (p - 3) * (p - 4) if p >= 4 else 1


# ---------------------------------------------------------------- perturbing


def perturb_marginals(m: Marginals, eps: Fraction | int | str, seed: int = 0) -> Marginals:
    """Add ``eps`` times fixed positive weights to x, y, z; each axis gains ``eps`` in total.

    The weights are i/sum(i) on the first axis and seeded random on the other
    two, so ties in the original marginals are broken for small ``eps``.
    This changes the polytope and is never applied implicitly.
    """
    if m.family.kind != "axial":
        raise InputError("perturbation is defined for axial marginals")
    eps = Fraction(eps)
    rng = random.Random("perturb:%s" % seed)

    def weights(n, first):
        w = [Fraction(i + 1) for i in range(n)] if first else [Fraction(rng.randint(1, 997)) for _ in range(n)]
        s = sum(w)
        return [v / s for v in w]

    l, mm, n = m.family.shape
    x = [a + eps * w for a, w in zip(m.x, weights(l, True))]
    y = [a + eps * w for a, w in zip(m.y, weights(mm, False))]
    z = [a + eps * w for a, w in zip(m.z, weights(n, False))]
    return Marginals.axial(x, y, z)


def generic_perturbation(m: Marginals, eps: Fraction | int | str = Fraction(1, 1000)) -> Marginals:
    """The first seeded perturbation whose polytope is verified non-degenerate."""
    from .vertices import find_degenerate_basis

    for seed in range(50):
        cand = perturb_marginals(m, eps, seed)
        if find_degenerate_basis(build_system(cand.family, cand)) is None:
            return cand
    raise NonGenericMarginals("no non-degenerate perturbation found")
