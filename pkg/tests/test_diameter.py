import itertools
from fractions import Fraction

import pytest

from tpoly.diameter import (AxialPolytope, NonGenericMarginals, case3_step, decrease_level, generic_perturbation,
                            is_staircase, northwest_corner_vertex, path_between, path_length_bound,
                            path_to_well_ordered, perturb_marginals, pivot_exchange, well_ordered_level,
                            well_ordered_vertex)
from tpoly.models import Family, InputError, Marginals, build_system, sample_marginals
from tpoly.vertices import bfs_distances, enumerate_vertices_exhaustive, enumerate_vertices_pivot

V_HAT = {(1, 1, 1): 40, (1, 2, 1): 6, (1, 3, 1): 36, (1, 3, 2): 30, (2, 3, 2): 14, (2, 3, 3): 4, (3, 3, 3): 30}

CASE1_V = {(1, 1, 2): 28, (2, 1, 2): 12, (2, 2, 3): 6, (1, 3, 2): 2, (1, 3, 1): 82, (3, 3, 2): 2, (3, 3, 3): 28}
CASE1_EXPECTED = {(1, 1, 2): 28, (2, 1, 2): 12, (2, 2, 3): 4, (1, 3, 2): 2, (1, 3, 1): 82, (2, 2, 2): 2,
                 (3, 3, 3): 28}

CASE3_V = {(1, 1, 3): 25, (3, 1, 1): 15, (3, 2, 1): 6, (1, 3, 1): 61, (1, 3, 2): 26, (2, 3, 2): 18, (3, 3, 3): 9}
CASE3_W = {(1, 1, 3): 19, (1, 1, 2): 6, (3, 1, 1): 15, (2, 2, 1): 6, (1, 3, 1): 61, (1, 3, 2): 26, (2, 3, 2): 12,
           (3, 3, 3): 15}
CASE3_B = {(1, 1, 3): 12, (1, 1, 2): 26, (3, 1, 1): 2, (3, 2, 1): 6, (3, 3, 3): 22, (2, 3, 2): 18, (1, 3, 1): 74}
CASE3_C = {(1, 1, 3): 22, (3, 1, 1): 18, (2, 2, 1): 6, (3, 3, 3): 12, (1, 3, 2): 32, (2, 3, 2): 12, (1, 3, 1): 58}
CASE3_D = {(1, 1, 3): 6, (1, 1, 2): 32, (3, 1, 1): 2, (2, 2, 1): 6, (3, 3, 3): 28, (2, 3, 2): 12, (1, 3, 1): 74}


@pytest.fixture(scope="module")
def poly333():
    return AxialPolytope(Marginals.axial([112, 18, 30], [40, 6, 114], [82, 44, 34]))


def test_northwest_corner(axial333):
    v = northwest_corner_vertex(axial333.family, axial333)
    assert v.table == V_HAT
    assert is_staircase(v.support_cells)


def test_unique_well_ordered_vertex(axial333):
    sys = build_system(axial333.family, axial333)
    stairs = [v for v in enumerate_vertices_pivot(sys).vertices if is_staircase(v.support_cells)]
    assert len(stairs) == 1 and stairs[0].table == V_HAT


def test_unique_well_ordered_small_exhaustive():
    f = Family.axial(2, 2, 3)
    for seed in range(10):
        m = sample_marginals(f, seed)
        stairs = [v for v in enumerate_vertices_exhaustive(build_system(f, m)) if is_staircase(v.support_cells)]
        assert [v.point for v in stairs] == [northwest_corner_vertex(f, m).point]


def test_one_by_one_line():
    m = Marginals.axial([10], [10], [3, 3, 4])
    assert northwest_corner_vertex(m.family, m).table == {(1, 1, 1): 3, (1, 1, 2): 3, (1, 1, 3): 4}


def test_northwest_tie_raises():
    m = Marginals.axial([2, 2], [2, 2], [2, 2])
    with pytest.raises(NonGenericMarginals):
        northwest_corner_vertex(m.family, m)


def test_levels(poly333):
    v = poly333.vertex(well_ordered_vertex(poly333))
    assert well_ordered_level(v) == 3
    assert well_ordered_level(poly333.point(V_HAT), (3, 3, 3), poly333.cells) <= 4


def test_level_of_top_cell_vertices(poly333):
    p = poly333.point(CASE1_V)
    assert well_ordered_level(p, (3, 3, 3), poly333.cells) <= 9
    assert well_ordered_level(poly333.point(CASE3_V), (3, 3, 3), poly333.cells) <= 9


def test_case1_pivot_example(poly333):
    v = poly333.point(CASE1_V)
    assert poly333.is_vertex(v)
    w = pivot_exchange(poly333, v, (3, 3, 3), (3, 3, 2), (2, 2, 3))
    got = poly333.table(w)
    assert poly333.is_edge(v, w)
    assert (3, 3, 2) not in got and got[(2, 2, 2)] == 2
    # every expected coordinate but (3,3,3) is reproduced; the 28 there breaks the z_3 sum
    assert {c: got[c] for c in CASE1_EXPECTED if c != (3, 3, 3)} == \
        {c: v for c, v in CASE1_EXPECTED.items() if c != (3, 3, 3)}
    assert got[(3, 3, 3)] == 30
    assert not poly333.contains(poly333.point(CASE1_EXPECTED))


def test_case3_quadrilateral(poly333):
    v = poly333.point(CASE3_V)
    assert poly333.is_vertex(v)
    pts = {name: poly333.point(t) for name, t in (("B", CASE3_B), ("C", CASE3_C), ("D", CASE3_D))}
    assert all(poly333.is_vertex(p) for p in pts.values())
    ring = poly333.face_polygon(poly333.support(v) | {(2, 2, 1), (1, 1, 2)})
    assert set(ring) == {v, *pts.values()}
    # the quadrilateral is V-B-D-C: C and B are the neighbours of V
    assert poly333.is_edge(v, pts["B"]) and poly333.is_edge(v, pts["C"])
    assert not poly333.is_edge(v, pts["D"])
    assert poly333.is_edge(pts["C"], pts["D"])
    steps = case3_step(poly333, v, (3, 3, 3), (3, 2, 1), (2, 3, 2), (1, 1, 3))
    assert steps == [pts["C"]]
    w = poly333.point(CASE3_W)
    assert poly333.contains(w) and not poly333.is_vertex(w)


def test_empty_path_at_target(poly333):
    p = well_ordered_vertex(poly333)
    assert len(path_to_well_ordered(poly333, p)) == 0
    assert len(path_between(poly333, p, p)) == 0


def test_decrease_level_rejects_low_level(poly333):
    with pytest.raises(InputError):
        decrease_level(poly333, well_ordered_vertex(poly333))


def _check_all(m):
    f = m.family
    g = enumerate_vertices_pivot(build_system(f, m))
    if g.flags["degenerate"]:
        return None
    poly = AxialPolytope(m)
    target = g.index_of(well_ordered_vertex(poly))
    dist = bfs_distances(g.edges, target)
    bound = path_length_bound(f.shape)
    assert bound <= (sum(f.shape) - 3) ** 2
    for i, v in enumerate(g.vertices):
        path = path_to_well_ordered(poly, v)
        assert dist[i] <= len(path) <= bound
        for level, edges in path.segments:
            assert edges <= 2 * (level - 4)
        for a, b in zip(path.points, path.points[1:]):
            assert poly.is_edge(a, b)
    return g


@pytest.mark.parametrize("shape", [(2, 2, 2), (2, 2, 3), (1, 3, 3), (1, 2, 4)])
def test_paths_random(shape):
    done = 0
    for seed in range(12):
        if _check_all(sample_marginals(Family.axial(*shape), seed, high=1000)) is not None:
            done += 1
    assert done >= 6


def test_path_between_all_pairs_222():
    f = Family.axial(2, 2, 2)
    for seed in range(4):
        m = sample_marginals(f, seed)
        g = enumerate_vertices_pivot(build_system(f, m))
        if g.flags["degenerate"]:
            continue
        poly = AxialPolytope(m)
        for a, b in itertools.combinations(range(len(g.vertices)), 2):
            path = path_between(poly, g.vertices[a], g.vertices[b])
            assert path.start == g.vertices[a].point and path.end == g.vertices[b].point
            assert bfs_distances(g.edges, a)[b] <= len(path) <= 2 * 3 ** 2


def test_perturbation_breaks_ties():
    m = Marginals.axial([2, 2], [2, 2], [2, 2])
    pm = perturb_marginals(m, "1/100", 0)
    assert sum(pm.x) == sum(pm.y) == sum(pm.z) == 4 + Fraction(1, 100)
    assert is_staircase(northwest_corner_vertex(pm.family, pm).support_cells)


def test_path_rejects_degenerate_vertex():
    m = Marginals.axial([2, 2], [2, 2], [2, 2])
    poly = AxialPolytope(m)
    v = enumerate_vertices_pivot(build_system(m.family, m)).vertices[0]
    with pytest.raises(NonGenericMarginals):
        path_to_well_ordered(poly, v)


def test_case_vertices_path_between(poly333, axial333):
    g = enumerate_vertices_pivot(build_system(axial333.family, axial333))
    a, b = poly333.point(CASE1_V), poly333.point(CASE3_V)
    path = path_between(poly333, a, b)
    assert path.start == a and path.end == b
    assert bfs_distances(g.edges, g.index_of(a))[g.index_of(b)] <= len(path) <= 72
    assert all(poly333.is_edge(p, q) for p, q in zip(path.points, path.points[1:]))


@pytest.mark.slow
def test_example_polytope_every_vertex_perturbed(axial333):
    # the bundled marginals are degenerate; a verified generic perturbation keeps V-hat's support
    pm = generic_perturbation(axial333)
    g = enumerate_vertices_pivot(build_system(pm.family, pm))
    assert not g.flags["degenerate"]
    poly = AxialPolytope(pm)
    assert poly.support(well_ordered_vertex(poly)) == frozenset(V_HAT)
    assert max(len(path_to_well_ordered(poly, v)) for v in g.vertices) <= 36
