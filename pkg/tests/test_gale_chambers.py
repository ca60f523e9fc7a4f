import math
import random
from fractions import Fraction

import pytest

from tpoly.chambers import (ChamberComplex, chamber_of, enumerate_chamber_orbits, enumerate_chambers,
                            symmetry_group)
from tpoly.diameter import is_staircase
from tpoly.gale import (Triangulation, VectorConfig, regular_triangulation, complement_map, enumerate_regular_triangulations, gale_transform,
                        is_regular, is_totally_cyclic, triangulation_of_signature)
from tpoly.linalg import independent_rows, row_space_equal
from tpoly.models import Family, Marginals, build_system, constraint_matrix, sample_marginals
from tpoly.vertices import enumerate_vertices_pivot

GALE_23 = [[1, -1, 0, -1, 1, 0], [1, 0, -1, -1, 0, 1]]


def _rows(conf):
    return [[v[i] for v in conf.vectors] for i in range(conf.rank)]


def test_gale_of_b23():
    conf = gale_transform(Family.classical(2, 3))
    assert conf.rank == 2
    assert row_space_equal(_rows(conf), GALE_23)


def test_gale_orthogonal_and_dual():
    for f in (Family.classical(3, 3), Family.axial(2, 2, 2), Family.planar(2, 2, 3)):
        b = constraint_matrix(f)
        conf = gale_transform(f)
        g = _rows(conf)
        assert all(sum(x * y for x, y in zip(r, s)) == 0 for r in b for s in g)
        back = gale_transform(g)
        assert row_space_equal(_rows(back), [list(r) for r in b])
        assert is_totally_cyclic(conf)


def test_corank_one():
    conf = gale_transform(Family.classical(2, 2))
    assert conf.rank == 1
    assert sorted(abs(v[0]) for v in conf.vectors) == [1, 1, 1, 1]
    assert sorted(v[0] for v in conf.vectors) == [-1, -1, 1, 1]


def test_twenty_two_has_four_chambers():
    # two positive and two negative rays: each pairing is a regular triangulation
    f = Family.classical(2, 2)
    assert len(enumerate_regular_triangulations(gale_transform(f))) == 4
    assert len(enumerate_chambers(f)) == 4


def test_h23_triangulations():
    conf = gale_transform(Family.classical(2, 3))
    ts = enumerate_regular_triangulations(conf)
    assert len(ts) == 18
    assert all(is_regular(conf, t) for t in ts)
    assert sum(len(t) == 6 for t in ts) == 1


def test_hexagon_chamber(hexagon):
    sys = build_system(hexagon.family, hexagon)
    ch = chamber_of(sys)
    assert ch.cardinality == 6
    conf = gale_transform(hexagon.family)
    six = next(t for t in enumerate_regular_triangulations(conf) if len(t) == 6)
    assert complement_map(six, 6) == ch.signature
    # chamber signature = bases of the vertices
    g = enumerate_vertices_pivot(sys)
    assert {v.basis for v in g.vertices} == set(ch.signature)


def test_example_triangulation_signature():
    t = Triangulation(frozenset({(0, 1), (0, 2), (1, 3), (2, 3)}))
    conf = gale_transform(Family.classical(2, 3))
    assert is_regular(conf, t)
    sig = complement_map(t, 6)
    assert len(sig) == 4
    assert triangulation_of_signature(sig, 6) == t


def test_single_simplex():
    conf = VectorConfig(((1, 0), (0, 1), (-1, -1)))
    ts = enumerate_regular_triangulations(conf)
    assert len(ts) == 1 and len(ts[0]) == 3


@pytest.mark.parametrize("f", [Family.classical(2, 3), Family.classical(2, 4), Family.classical(3, 3),
                               Family.planar(2, 2, 3), Family.axial(2, 2, 2)])
def test_bijection_chambers_triangulations(f):
    chambers = enumerate_chambers(f)
    ts = enumerate_regular_triangulations(gale_transform(f))
    n = f.num_columns
    assert len(chambers) == len(ts)
    assert {complement_map(t, n) for t in ts} == {c.signature for c in chambers}


def test_chamber_cardinality_is_vertex_count():
    f = Family.classical(3, 3)
    cx = ChamberComplex(f)
    for seed in range(10):
        sys = build_system(f, sample_marginals(f, seed))
        ch = chamber_of(sys, cx)
        assert ch.cardinality == len(enumerate_vertices_pivot(sys).vertices)


def test_chamber_representatives_reproduce():
    for ch in enumerate_chambers(Family.classical(2, 4)):
        f = Family.classical(2, 4)
        m = Marginals.classical(ch.marginals[:2], ch.marginals[2:])
        g = enumerate_vertices_pivot(build_system(f, m))
        assert not g.flags["degenerate"]
        assert {v.basis for v in g.vertices} == set(ch.signature)


@pytest.mark.parametrize("shape", [(2, 2, 2), (2, 2, 3), (2, 3, 3), (1, 3, 4)])
def test_staircase_triangulation_is_regular(shape):
    # a strongly supermodular height function, perturbed to be generic, lifts B to the staircases
    f = Family.axial(*shape)
    b = constraint_matrix(f)
    rows = [b[i] for i in independent_rows(b)]
    conf = VectorConfig(tuple(tuple(r[j] for r in rows) for j in range(f.num_columns)))
    rng = random.Random(1)
    heights = [-1000 * (i * j + j * k + i * k) + Fraction(rng.randint(0, 999), 1000) for i, j, k in f.cells]
    t = regular_triangulation(conf, heights)
    l, m, n = shape
    expected = math.factorial(l + m + n - 3) // (math.factorial(l - 1) * math.factorial(m - 1) * math.factorial(n - 1))
    assert len(t) == expected
    assert all(is_staircase(f.cells[j] for j in s) for s in t.simplices)


@pytest.mark.parametrize("f, orbits, total", [(Family.classical(2, 3), 5, 18), (Family.classical(3, 3), 13, 342),
                                              (Family.planar(2, 2, 3), 18, 416), (Family.axial(2, 2, 2), 3, 96)])
def test_orbits_sum_to_chambers(f, orbits, total):
    out = enumerate_chamber_orbits(f)
    assert len(out) == orbits and sum(s for _, s in out) == total
    assert total == len(enumerate_chambers(f))


def test_symmetry_group_orders():
    assert len(symmetry_group(Family.classical(2, 3))) == 2 * 6
    assert len(symmetry_group(Family.classical(3, 3))) == 6 * 6 * 2
    assert len(symmetry_group(Family.planar(2, 2, 3))) == 2 * 2 * 6 * 2
