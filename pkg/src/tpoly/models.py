"""Transportation polytope families, their constraint systems and marginal data."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .linalg import RatMatrix, fraction_str, independent_rows, rank, to_fraction


class InputError(ValueError):
    """Malformed or out-of-contract input."""


class InfeasibleMarginals(InputError):
    """The marginals describe an empty polytope."""


class DegenerateRHS(InputError):
    """The right-hand side lies on a wall of the chamber complex."""


KINDS = ("classical", "axial", "planar")


@dataclass(frozen=True)
class Family:
    kind: str
    shape: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError("unknown family %r" % self.kind)
        want = 2 if self.kind == "classical" else 3
        if len(self.shape) != want:
            raise InputError("%s family needs %d size parameters, got %r" % (self.kind, want, self.shape))
        if any(not isinstance(s, int) or s < 1 for s in self.shape):
            raise InputError("size parameters must be positive integers: %r" % (self.shape,))

    @classmethod
    def classical(cls, m: int, n: int) -> "Family":
        return cls("classical", (m, n))

    @classmethod
    def axial(cls, l: int, m: int, n: int) -> "Family":
        return cls("axial", (l, m, n))

    @classmethod
    def planar(cls, l: int, m: int, n: int) -> "Family":
        return cls("planar", (l, m, n))

    @classmethod
    def parse(cls, kind: str, shape: str) -> "Family":
        try:
            dims = tuple(int(s) for s in shape.lower().split("x"))
        except ValueError:
            raise InputError("shape must look like 2x3 or 2x2x3, got %r" % shape) from None
        return cls(kind, dims)

    @property
    def shape_str(self) -> str:
        return "x".join(map(str, self.shape))

    def __str__(self) -> str:
        return "%s %s" % (self.kind, self.shape_str)

    @cached_property
    def cells(self) -> tuple[tuple[int, ...], ...]:
        """Table cells in canonical (lexicographic, 1-based) column order."""
        return tuple(itertools.product(*(range(1, s + 1) for s in self.shape)))

    @property
    def num_columns(self) -> int:
        return len(self.cells)


def dimension(f: Family) -> int:
    if f.kind == "classical":
        m, n = f.shape
        return (m - 1) * (n - 1)
    l, m, n = f.shape
    if f.kind == "axial":
        return l * m * n - l - m - n + 2
    return (l - 1) * (m - 1) * (n - 1)


def expected_rank(f: Family) -> int:
    if f.kind == "classical":
        m, n = f.shape
        return m + n - 1
    l, m, n = f.shape
    if f.kind == "axial":
        return l + m + n - 2
    return l * m + l * n + m * n - l - m - n + 1


def row_labels(f: Family) -> tuple[tuple, ...]:
    if f.kind == "classical":
        m, n = f.shape
        return tuple([("x", i) for i in range(1, m + 1)] + [("y", j) for j in range(1, n + 1)])
    l, m, n = f.shape
    if f.kind == "axial":
        return tuple([("x", i) for i in range(1, l + 1)] + [("y", j) for j in range(1, m + 1)]
                     + [("z", k) for k in range(1, n + 1)])
    return tuple([("U", j, k) for j in range(1, m + 1) for k in range(1, n + 1)]
                 + [("V", i, k) for i in range(1, l + 1) for k in range(1, n + 1)]
                 + [("W", i, j) for i in range(1, l + 1) for j in range(1, m + 1)])


def _row_hits(label: tuple, cell: tuple[int, ...]) -> bool:
    name = label[0]
    if len(cell) == 2:
        return cell[0] == label[1] if name == "x" else cell[1] == label[1]
    i, j, k = cell
    if name == "x":
        return i == label[1]
    if name == "y":
        return j == label[1]
    if name == "z":
        return k == label[1]
    if name == "U":
        return (j, k) == label[1:]
    if name == "V":
        return (i, k) == label[1:]
    return (i, j) == label[1:]


def constraint_matrix(f: Family) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(_row_hits(lab, cell)) for cell in f.cells) for lab in row_labels(f))


def _vec(values, length: int, name: str) -> tuple[Fraction, ...]:
    vals = tuple(to_fraction(v) for v in values)
    if len(vals) != length:
        raise InputError("%s must have length %d, got %d" % (name, length, len(vals)))
    return vals


def _mat(values, rows: int, cols: int, name: str) -> tuple[tuple[Fraction, ...], ...]:
    out = tuple(tuple(to_fraction(v) for v in row) for row in values)
    if len(out) != rows or any(len(r) != cols for r in out):
        raise InputError("%s must be %dx%d" % (name, rows, cols))
    return out


@dataclass(frozen=True)
class Marginals:
    """Line sums of a table: x, y (and z) for classical/axial, U, V, W for planar.

    For planar tables ``U[j][k]``, ``V[i][k]`` and ``W[i][j]`` sum a[i][j][k]
    over the missing index.
    """

    family: Family
    x: tuple[Fraction, ...] = ()
    y: tuple[Fraction, ...] = ()
    z: tuple[Fraction, ...] = ()
    U: tuple[tuple[Fraction, ...], ...] = ()
    V: tuple[tuple[Fraction, ...], ...] = ()
    W: tuple[tuple[Fraction, ...], ...] = ()

    @classmethod
    def classical(cls, x: Sequence, y: Sequence) -> "Marginals":
        f = Family.classical(len(x), len(y))
        return cls(f, x=_vec(x, len(x), "x"), y=_vec(y, len(y), "y"))

    @classmethod
    def axial(cls, x: Sequence, y: Sequence, z: Sequence) -> "Marginals":
        f = Family.axial(len(x), len(y), len(z))
        return cls(f, x=_vec(x, len(x), "x"), y=_vec(y, len(y), "y"), z=_vec(z, len(z), "z"))

    @classmethod
    def planar(cls, U: Sequence, V: Sequence, W: Sequence) -> "Marginals":
        l, m = len(W), len(W[0]) if W else 0
        n = len(U[0]) if U else 0
        f = Family.planar(l, m, n)
        return cls(f, U=_mat(U, m, n, "U"), V=_mat(V, l, n, "V"), W=_mat(W, l, m, "W"))

    @classmethod
    def of_table(cls, f: Family, table: dict[tuple[int, ...], object]) -> "Marginals":
        """Marginals of a table given as {cell: value} over ``f.cells``."""
        rhs = [sum((to_fraction(table.get(c, 0)) for c in f.cells if _row_hits(lab, c)), Fraction(0))
               for lab in row_labels(f)]
        return marginals_from_rhs(f, rhs)

    def rhs(self) -> tuple[Fraction, ...]:
        f = self.family
        if f.kind == "classical":
            return self.x + self.y
        if f.kind == "axial":
            return self.x + self.y + self.z
        return sum(self.U, ()) + sum(self.V, ()) + sum(self.W, ())

    def to_json(self) -> dict:
        f = self.family
        out: dict = {"family": f.kind}
        if f.kind == "classical":
            out.update(m=f.shape[0], n=f.shape[1])
        else:
            out.update(l=f.shape[0], m=f.shape[1], n=f.shape[2])
        if f.kind == "planar":
            for name in "UVW":
                out[name] = [[fraction_str(v) for v in row] for row in getattr(self, name)]
        else:
            for name in ("xy" if f.kind == "classical" else "xyz"):
                out[name] = [fraction_str(v) for v in getattr(self, name)]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def marginals_from_rhs(f: Family, rhs: Sequence) -> Marginals:
    rhs = [to_fraction(v) for v in rhs]
    if f.kind == "classical":
        m, n = f.shape
        return Marginals(f, x=tuple(rhs[:m]), y=tuple(rhs[m:m + n]))
    l, m, n = f.shape
    if f.kind == "axial":
        return Marginals(f, x=tuple(rhs[:l]), y=tuple(rhs[l:l + m]), z=tuple(rhs[l + m:]))
    U = tuple(tuple(rhs[j * n:(j + 1) * n]) for j in range(m))
    off = m * n
    V = tuple(tuple(rhs[off + i * n:off + (i + 1) * n]) for i in range(l))
    off += l * n
    W = tuple(tuple(rhs[off + i * m:off + (i + 1) * m]) for i in range(l))
    return Marginals(f, U=U, V=V, W=W)


def marginals_from_json(data: dict | str) -> Marginals:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InputError("malformed marginals JSON: %s" % exc) from None
    if not isinstance(data, dict):
        raise InputError("marginals JSON must be an object")
    kind = data.get("family")
    try:
        if kind == "classical":
            m, n = int(data["m"]), int(data["n"])
            f = Family.classical(m, n)
            return Marginals(f, x=_vec(data["x"], m, "x"), y=_vec(data["y"], n, "y"))
        if kind in ("axial", "planar"):
            l, m, n = int(data["l"]), int(data["m"]), int(data["n"])
            f = Family(kind, (l, m, n))
            if kind == "axial":
                return Marginals(f, x=_vec(data["x"], l, "x"), y=_vec(data["y"], m, "y"),
                                 z=_vec(data["z"], n, "z"))
            return Marginals(f, U=_mat(data["U"], m, n, "U"), V=_mat(data["V"], l, n, "V"),
                             W=_mat(data["W"], l, m, "W"))
    except KeyError as exc:
        raise InputError("marginals JSON is missing field %s" % exc) from None
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError("bad value in marginals JSON: %s" % exc) from None
    raise InputError("unknown family %r" % kind)


def load_marginals(path) -> Marginals:
    with open(path) as fh:
        return marginals_from_json(fh.read())


def _check_consistent(m: Marginals) -> None:
    f = m.family
    if any(v < 0 for v in m.rhs()):
        raise InputError("marginals must be nonnegative")
    if f.kind == "classical":
        if sum(m.x) != sum(m.y):
            raise InfeasibleMarginals("row and column totals differ: %s != %s" % (sum(m.x), sum(m.y)))
        return
    if f.kind == "axial":
        tx, ty, tz = sum(m.x), sum(m.y), sum(m.z)
        if not tx == ty == tz:
            raise InfeasibleMarginals("axis totals differ: %s, %s, %s" % (tx, ty, tz))
        return
    l, mm, n = f.shape
    U, V, W = m.U, m.V, m.W
    zk_u = [sum(U[j][k] for j in range(mm)) for k in range(n)]
    zk_v = [sum(V[i][k] for i in range(l)) for k in range(n)]
    yj_u = [sum(U[j]) for j in range(mm)]
    yj_w = [sum(W[i][j] for i in range(l)) for j in range(mm)]
    xi_v = [sum(V[i]) for i in range(l)]
    xi_w = [sum(W[i]) for i in range(l)]
    if zk_u != zk_v or yj_u != yj_w or xi_v != xi_w:
        raise InfeasibleMarginals("plane sums U, V, W have incompatible line sums")


@dataclass(frozen=True)
class ConstraintSystem:
    """``B x = c, x >= 0`` for one family and one set of marginals."""

    family: Family
    matrix: tuple[tuple[int, ...], ...]
    c: tuple[Fraction, ...]
    labels: tuple[tuple, ...]

    @property
    def B(self) -> RatMatrix:
        return RatMatrix.from_rows(self.matrix, cols=self.num_columns)

    @property
    def num_columns(self) -> int:
        return self.family.num_columns

    @property
    def cells(self) -> tuple[tuple[int, ...], ...]:
        return self.family.cells

    @cached_property
    def rank(self) -> int:
        return rank(self.matrix)

    @cached_property
    def independent_rows(self) -> tuple[int, ...]:
        return tuple(independent_rows(self.matrix))

    def reduced(self) -> tuple[tuple[tuple[int, ...], ...], tuple[Fraction, ...]]:
        """Full-row-rank part of (B, c): the redundant rows dropped."""
        rows = self.independent_rows
        return tuple(self.matrix[i] for i in rows), tuple(self.c[i] for i in rows)

    def with_rhs(self, c: Sequence) -> "ConstraintSystem":
        return ConstraintSystem(self.family, self.matrix, tuple(to_fraction(v) for v in c), self.labels)

    def marginals(self) -> Marginals:
        return marginals_from_rhs(self.family, self.c)

    def check_point(self, x: Sequence) -> bool:
        x = [to_fraction(v) for v in x]
        return all(v >= 0 for v in x) and all(
            sum((x[j] for j, a in enumerate(row) if a), Fraction(0)) == ci
            for row, ci in zip(self.matrix, self.c))


def build_system(f: Family, m: Marginals | None = None) -> ConstraintSystem:
    """Constraint matrix and right-hand side; without marginals the right side is zero."""
    if m is None:
        c = (Fraction(0),) * len(row_labels(f))
    else:
        if m.family != f:
            raise InputError("marginals are for %s, not %s" % (m.family, f))
        _check_consistent(m)
        c = m.rhs()
    return ConstraintSystem(f, constraint_matrix(f), c, row_labels(f))


def system_of(m: Marginals) -> ConstraintSystem:
    return build_system(m.family, m)


def random_table(f: Family, rng: random.Random, low: int = 1, high: int = 10 ** 6) -> dict:
    return {cell: rng.randint(low, high) for cell in f.cells}


def sample_marginals(f: Family, seed, low: int = 1, high: int = 10 ** 6) -> Marginals:
    """Marginals of a random strictly positive integer table, reproducible per seed."""
    rng = random.Random("%s:%s:%s" % (f.kind, f.shape_str, seed))
    return Marginals.of_table(f, random_table(f, rng, low, high))


def is_degenerate(f: Family, m: Marginals) -> bool:
    """True when some feasible basis has a zero basic value (or the polytope is not full-dimensional)."""
    from .vertices import find_degenerate_basis

    return find_degenerate_basis(build_system(f, m)) is not None
