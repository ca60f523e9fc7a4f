import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpoly.linalg import LpProblem, Optimal, simplex_solve
from tpoly.models import (Family, InfeasibleMarginals, InputError, Marginals, build_system, constraint_matrix,
                          dimension, expected_rank, is_degenerate, load_marginals, marginals_from_json,
                          sample_marginals)
from tpoly.vertices import enumerate_vertices_exhaustive

B23 = ((1, 1, 1, 0, 0, 0), (0, 0, 0, 1, 1, 1), (1, 0, 0, 1, 0, 0), (0, 1, 0, 0, 1, 0), (0, 0, 1, 0, 0, 1))

families = st.sampled_from([Family.classical(2, 3), Family.classical(3, 3), Family.axial(2, 2, 2),
                            Family.axial(2, 2, 3), Family.planar(2, 2, 3), Family.planar(2, 3, 3)])


def test_classical_matrix_exact():
    assert constraint_matrix(Family.classical(2, 3)) == B23


def test_axial_single_cell():
    sys = build_system(Family.axial(1, 1, 1), Marginals.axial([1], [1], [1]))
    assert len(sys.matrix) == 3 and len(sys.matrix[0]) == 1
    assert [v.point for v in enumerate_vertices_exhaustive(sys)] == [(1,)]


def test_planar_222_is_a_segment():
    one = [[1, 1], [1, 1]]
    sys = build_system(Family.planar(2, 2, 2), Marginals.planar(one, one, one))
    assert sys.rank == 7 and len(enumerate_vertices_exhaustive(sys)) == 2


@pytest.mark.parametrize("f, d", [(Family.axial(2, 2, 3), 7), (Family.planar(2, 3, 3), 4),
                                  (Family.classical(3, 4), 6), (Family.planar(2, 2, 2), 1)])
def test_dimension(f, d):
    assert dimension(f) == d


@pytest.mark.parametrize("f", [Family.classical(3, 4), Family.axial(2, 3, 3), Family.planar(2, 3, 4)])
def test_rank_plus_dimension_is_columns(f):
    sys = build_system(f)
    assert sys.rank == expected_rank(f)
    assert sys.rank + dimension(f) == f.num_columns


@settings(max_examples=40, deadline=None)
@given(families, st.integers(0, 10 ** 6))
def test_sampled_marginals_consistent(f, seed):
    m = sample_marginals(f, seed)
    assert m == sample_marginals(f, seed)
    if f.kind == "axial":
        assert sum(m.x) == sum(m.y) == sum(m.z)
    assert build_system(f, m).check_point  # builds without raising


def test_sampled_classical_nonempty():
    f = Family.classical(3, 3)
    for seed in range(1000):
        sys = build_system(f, sample_marginals(f, seed))
        res = simplex_solve(LpProblem(sys.matrix, sys.c, [0] * 9))
        assert isinstance(res, Optimal)


def test_inconsistent_rejected():
    with pytest.raises(InfeasibleMarginals):
        build_system(Family.classical(2, 2), Marginals.classical([1, 2], [1, 1]))
    with pytest.raises(InfeasibleMarginals):
        build_system(Family.axial(1, 1, 2), Marginals.axial([3], [3], [1, 1]))


def test_degeneracy_examples():
    assert is_degenerate(Family.classical(2, 2), Marginals.classical([1, 1], [1, 1]))
    assert is_degenerate(Family.classical(2, 3), Marginals.classical([3, 4], [1, 2, 4]))
    assert not is_degenerate(Family.classical(2, 3), Marginals.classical([3, 3], [2, 2, 2]))
    three = [[3] * 3] * 3
    assert is_degenerate(Family.planar(3, 3, 3), Marginals.planar(three, three, three))


def _oracle_degenerate(f, m):
    sys = build_system(f, m)
    return any(len(v.support) < sys.rank or len(v.bases) > 1 for v in enumerate_vertices_exhaustive(sys))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([Family.classical(2, 3), Family.classical(2, 4), Family.axial(2, 2, 2)]),
       st.integers(0, 10 ** 6), st.integers(2, 6))
def test_degeneracy_matches_exhaustive(f, seed, high):
    m = sample_marginals(f, seed, low=1, high=high)
    assert is_degenerate(f, m) == _oracle_degenerate(f, m)


def test_json_roundtrip(tmp_path, hexagon):
    p = tmp_path / "m.json"
    p.write_text(hexagon.dumps())
    assert load_marginals(p) == hexagon
    f = Family.planar(2, 2, 3)
    m = sample_marginals(f, 3)
    assert marginals_from_json(json.loads(m.dumps())) == m


@pytest.mark.parametrize("text", ["{", "[]", '{"family": "cubic"}', '{"family": "classical", "m": 2}',
                                  '{"family": "classical", "m": 1, "n": 1, "x": ["a"], "y": [1]}'])
def test_malformed_json(text):
    with pytest.raises(InputError):
        marginals_from_json(text)


def test_shape_parse():
    assert Family.parse("planar", "2x3x4").shape == (2, 3, 4)
    with pytest.raises(InputError):
        Family.parse("axial", "2x3")
