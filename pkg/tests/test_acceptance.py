"""Acceptance suite: one test per criterion, reported as a PASS/FAIL line at the end of the run.

Run alone with ``pytest tests/test_acceptance.py -v`` (about 20 minutes on one core).
"""

import math
import random
import time

import pytest

from tpoly.catalogue import build_catalogue, distinct_counts, expected_rows, named_example, type_vertex_counts
from tpoly.chambers import enumerate_chambers
from tpoly.diameter import (AxialPolytope, is_staircase, northwest_corner_vertex, path_length_bound,
                            path_to_well_ordered, pivot_exchange, well_ordered_vertex)
from tpoly.gale import enumerate_regular_triangulations, gale_transform
from tpoly.linalg import row_space_equal
from tpoly.models import Family, Marginals, build_system, marginals_from_json, sample_marginals
from tpoly.structure import (all_cuts, cut_delta, gcd_divisibility_check, lexicographic_chamber,
                             planar22n_to_classical, preserves_edges, vertex_correspondence)
from tpoly.universal import build_universal_constraints, solution_dimension, vertex_count_bounds
from tpoly.vertices import (basic_solution, bfs_distances, enumerate_vertices_exhaustive, enumerate_vertices_pivot)

ROWS = expected_rows()
_catalogues: dict[tuple[str, str], list] = {}


def catalogue(kind, shape, symmetry=False):
    key = (kind, shape, symmetry)
    if key not in _catalogues:
        _catalogues[key] = build_catalogue(Family.parse(kind, shape), symmetry=symmetry)
    return _catalogues[key]


def timed(fn, *args):
    t = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t


@pytest.mark.criterion(1)
def test_criterion_01_classical_23():
    """classical 2x3: 18 chambers, vertex counts {3,4,5,6}, under 5 s"""
    entries, secs = timed(catalogue, "classical", "2x3")
    assert len(entries) == 18
    assert distinct_counts(entries) == [3, 4, 5, 6] == ROWS["classical"]["2x3"]
    assert secs < 5
    # second route: regular triangulations of the Gale transform
    assert len(enumerate_regular_triangulations(gale_transform(Family.classical(2, 3)))) == 18


@pytest.mark.criterion(2)
def test_criterion_02_classical_rows():
    """classical 2x4, 2x5, 3x3 rows reproduced, under 10 min combined"""
    total = 0.0
    for shape in ("2x4", "2x5", "3x3"):
        entries, secs = timed(catalogue, "classical", shape)
        total += secs
        assert distinct_counts(entries) == ROWS["classical"][shape], shape
    assert ROWS["classical"]["2x4"] == [4, 6, 8, 10, 12]
    assert ROWS["classical"]["3x3"] == [9, 12, 15, 18]
    assert len(ROWS["classical"]["2x5"]) == 21
    assert total < 600


@pytest.mark.criterion(3)
def test_criterion_03_planar_axial_rows():
    """planar 2x2x2, 2x2x3, 2x2x4 and axial 2x2x2, 2x2x3 rows reproduced, under 30 min combined"""
    total = 0.0
    for kind, shape in (("planar", "2x2x2"), ("planar", "2x2x3"), ("planar", "2x2x4"),
                        ("axial", "2x2x2"), ("axial", "2x2x3")):
        entries, secs = timed(catalogue, kind, shape)
        total += secs
        assert distinct_counts(entries) == ROWS[kind][shape], (kind, shape)
    assert ROWS["planar"]["2x2x2"] == [2]
    assert ROWS["axial"]["2x2x2"] == [8, 11, 14]
    assert len(ROWS["axial"]["2x2x3"]) == 31
    assert total < 1800


@pytest.mark.criterion(4)
def test_criterion_04_planar_333_examples():
    """bundled planar 3x3x3 sample marginals give 270 vertices, generalized Birkhoff 3x3x3 gives 66, under 30 min each"""
    for name, count in (("planar-333-sample", 270), ("planar-333-birkhoff", 66)):
        m = marginals_from_json(named_example(name))
        g, secs = timed(enumerate_vertices_pivot, build_system(m.family, m))
        assert len(g.vertices) == count, name
        assert secs < 1800
    three = [[3] * 3] * 3
    assert marginals_from_json(named_example("planar-333-birkhoff")) == Marginals.planar(three, three, three)


@pytest.mark.criterion(5)
def test_criterion_05_gale_b23():
    """Gale transform of B_{2,3} is row-equivalent to the expected rank-2 matrix"""
    conf = gale_transform(Family.classical(2, 3))
    rows = [[v[i] for v in conf.vectors] for i in range(conf.rank)]
    assert conf.rank == 2
    assert row_space_equal(rows, [[1, -1, 0, -1, 1, 0], [1, 0, -1, -1, 0, 1]])


@pytest.mark.criterion(6)
def test_criterion_06_universal_bounds():
    """universal-polytope LP bounds on the 2x3 Gale transform are exactly (3, 6), dimension 6"""
    u = build_universal_constraints(gale_transform(Family.classical(2, 3)))
    assert vertex_count_bounds(u) == (3, 6)
    assert solution_dimension(u) == 6


@pytest.mark.criterion(7)
def test_criterion_07_northwest_corner():
    """northwest corner on the 3x3x3 example gives the seven expected entries and the unique staircase vertex"""
    m = Marginals.axial([112, 18, 30], [40, 6, 114], [82, 44, 34])
    expected = {(1, 1, 1): 40, (1, 2, 1): 6, (1, 3, 1): 36, (1, 3, 2): 30, (2, 3, 2): 14, (2, 3, 3): 4,
               (3, 3, 3): 30}
    v = northwest_corner_vertex(m.family, m)
    assert v.table == expected
    sys = build_system(m.family, m)
    assert basic_solution(sys, [m.family.cells.index(c) for c in expected]).table == expected
    stairs = [w for w in enumerate_vertices_pivot(sys).vertices if is_staircase(w.support_cells)]
    assert [w.point for w in stairs] == [v.point]


@pytest.mark.criterion(8)
def test_criterion_08_case1_example():
    """case-1 pivot example reproduces the expected V' (beta=(3,3,2) leaves, delta=(2,2,2) enters with 2)"""
    poly = AxialPolytope(Marginals.axial([112, 18, 30], [40, 6, 114], [82, 44, 34]))
    v = poly.point({(1, 1, 2): 28, (2, 1, 2): 12, (2, 2, 3): 6, (1, 3, 2): 2, (1, 3, 1): 82, (3, 3, 2): 2,
                    (3, 3, 3): 28})
    expected = {(1, 1, 2): 28, (2, 1, 2): 12, (2, 2, 3): 4, (1, 3, 2): 2, (1, 3, 1): 82, (2, 2, 2): 2,
               (3, 3, 3): 28}
    w = pivot_exchange(poly, v, (3, 3, 3), (3, 3, 2), (2, 2, 3))
    got = poly.table(w)
    assert poly.is_edge(v, w)
    assert (3, 3, 2) not in got and got[(2, 2, 2)] == 2
    assert got == expected, "computed V' %s differs from the expected one" % {
        c: (got.get(c), expected.get(c)) for c in set(got) | set(expected) if got.get(c) != expected.get(c)}


def _path_instances():
    """Non-degenerate axial instances with l+m+n <= 9, cheapest shapes most often."""
    plan = [((2, 2, 2), 70), ((1, 3, 3), 25), ((1, 2, 4), 20), ((1, 3, 5), 5), ((2, 2, 3), 60),
            ((1, 4, 4), 5), ((2, 2, 4), 10), ((2, 3, 3), 6)]
    for shape, count in plan:
        f = Family.axial(*shape)
        seed = found = 0
        while found < count:
            m = sample_marginals(f, ("path", shape, seed), high=1000)
            seed += 1
            g = enumerate_vertices_pivot(build_system(f, m))
            if g.flags["degenerate"]:
                continue
            found += 1
            yield m, g


@pytest.mark.criterion(9)
def test_criterion_09_path_bounds():
    """random non-degenerate axial instances (l+m+n <= 9): every constructed path within the bounds"""
    instances = paths = 0
    for m, g in _path_instances():
        shape = m.family.shape
        p = sum(shape)
        poly = AxialPolytope(m)
        target = g.index_of(well_ordered_vertex(poly))
        dist = bfs_distances(g.edges, target)
        for i, v in enumerate(g.vertices):
            path = path_to_well_ordered(poly, v)
            assert len(path) <= path_length_bound(shape) <= (p - 3) ** 2
            assert all(edges <= 2 * (level - 4) for level, edges in path.segments)
            idx = [g.index_of(q) for q in path.points]
            assert all(b in g.edges[a] for a, b in zip(idx, idx[1:])), "path step is not a skeleton edge"
            assert idx[-1] == target
            assert dist[i] <= len(path)
            paths += 1
        instances += 1
    assert instances >= 200
    print("%d instances, %d paths" % (instances, paths))


@pytest.mark.criterion(10)
def test_criterion_10_gcd():
    """vertex counts divisible by gcd(m,n); lexicographic chambers have m^(n-1) cones; cut deltas vanish mod gcd"""
    for shape in ("2x3", "2x4", "2x5", "3x3"):
        m, n = map(int, shape.split("x"))
        counts = [e.vertices for e in catalogue("classical", shape)]
        report = gcd_divisibility_check(m, n, counts)
        assert report.ok, (shape, report.violations)
        assert all(c % math.gcd(m, n) == 0 for c in counts)
    for m in range(1, 6):
        for n in range(1, 6):
            assert lexicographic_chamber(m, n).cardinality == m ** (n - 1), (m, n)
            assert lexicographic_chamber(m, n, "rows").cardinality == n ** (m - 1), (m, n)
    for m in range(1, 5):
        for n in range(1, 5):
            for cut in all_cuts(m, n):
                out, into = cut.cocircuit(m, n)
                assert cut_delta(m, n, cut) == len(out) - len(into)
                assert cut_delta(m, n, cut) % math.gcd(m, n) == 0


@pytest.mark.criterion(11)
def test_criterion_11_planar_22n():
    """planar 2x2xn and classical 2xn have equal vertex-count multisets over combinatorial types (n=3,4,5); the affine map is a graph isomorphism"""
    for n in (3, 4, 5):
        planar = catalogue("planar", "2x2x%d" % n, True)
        classical = catalogue("classical", "2x%d" % n, True)
        assert type_vertex_counts(planar) == type_vertex_counts(classical), n
        assert distinct_counts(planar) == distinct_counts(classical)
    rng = random.Random(11)
    for trial in range(30):
        n = rng.choice((3, 4, 5))
        m = sample_marginals(Family.planar(2, 2, n), ("iso", trial))
        gp, gc, perm = vertex_correspondence(planar22n_to_classical(m))
        assert preserves_edges(gp, gc, perm)


@pytest.mark.criterion(12)
def test_criterion_12_oracle_equivalence():
    """pivot-BFS equals exhaustive basis enumeration on 500+ random instances with at most 12 columns"""
    shapes = [Family.classical(2, 2), Family.classical(2, 3), Family.classical(2, 4), Family.classical(3, 3),
              Family.classical(2, 5), Family.classical(2, 6), Family.classical(3, 4), Family.axial(2, 2, 2),
              Family.axial(2, 2, 3), Family.axial(1, 3, 3), Family.axial(1, 2, 5), Family.planar(2, 2, 2),
              Family.planar(2, 2, 3), Family.planar(2, 3, 2)]
    assert all(f.num_columns <= 12 for f in shapes)
    rng = random.Random(12)
    checked = degenerate = 0
    for trial in range(560):
        f = shapes[trial % len(shapes)]
        m = sample_marginals(f, ("oracle", trial), high=rng.choice((3, 6, 20, 10 ** 6)))
        sys = build_system(f, m)
        g = enumerate_vertices_pivot(sys)
        assert sorted(v.point for v in g.vertices) == sorted(v.point for v in enumerate_vertices_exhaustive(sys))
        degenerate += g.flags["degenerate"]
        checked += 1
    assert checked >= 500
    print("%d instances, %d degenerate" % (checked, degenerate))
