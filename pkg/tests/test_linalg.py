import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpoly.linalg import (Infeasible, LpProblem, Optimal, RatMatrix, Unbounded, determinant, inverse, matmul,
                          matvec, nullspace_basis, rank, row_space_equal, simplex_solve, solve_square,
                          strictly_feasible_point)

small = st.integers(min_value=-5, max_value=5)


def test_identity_solve():
    eye = RatMatrix.identity(3).tolist()
    assert solve_square(eye, [1, 2, 3]) == [1, 2, 3]


def test_symmetric_two_by_two():
    assert solve_square([[1, 1], [1, -1]], [1, 0]) == [Fraction(1, 2), Fraction(1, 2)]


def test_singular_returns_none():
    assert solve_square([[1, 2], [2, 4]], [1, 2]) is None


def test_random_invertible_roundtrip():
    rng = random.Random(7)
    done = 0
    while done < 20:
        a = [[Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(7)] for _ in range(7)]
        if determinant(a) == 0:
            continue
        x = [Fraction(rng.randint(-20, 20), rng.randint(1, 7)) for _ in range(7)]
        assert solve_square(a, matvec(a, x)) == x
        done += 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=4, max_size=4), st.lists(small, min_size=4, max_size=4))
def test_residual_is_zero(a, b):
    x = solve_square(a, b)
    if x is None:
        assert determinant(a) == 0
    else:
        assert matvec(a, x) == [Fraction(v) for v in b]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=5, max_size=5), min_size=1, max_size=4))
def test_nullspace_is_complement(a):
    ns = nullspace_basis(a)
    assert ns.cols == 5 - rank(a)
    for v in ns.columns():
        assert all(x == 0 for x in matvec(a, v))
    if ns.cols:
        assert rank(ns.columns()) == ns.cols


def test_nullspace_examples():
    ns = nullspace_basis([[1, 1]])
    assert ns.cols == 1 and row_space_equal(ns.columns(), [[1, -1]])
    assert nullspace_basis([[1, 0], [0, 1]]).cols == 0


def test_inverse():
    a = [[2, 1], [1, 1]]
    assert matmul(a, inverse(a)) == [[1, 0], [0, 1]]
    assert inverse([[1, 1], [1, 1]]) is None


def test_simplex_optimal():
    res = simplex_solve(LpProblem([[1, 1]], [1], [1, 0], sense="max"))
    assert isinstance(res, Optimal) and res.value == 1 and res.x == (1, 0)


def test_simplex_unbounded():
    res = simplex_solve(LpProblem([[1, -1]], [0], [1, 0], sense="max"))
    assert isinstance(res, Unbounded)
    assert all(v >= 0 for v in res.ray) and res.ray[0] > 0


def test_simplex_infeasible_certificate():
    a, b = [[1, 1]], [-1]
    res = simplex_solve(LpProblem(a, b, [0, 0]))
    assert isinstance(res, Infeasible)
    y = res.certificate
    assert all(sum(y[i] * a[i][j] for i in range(1)) <= 0 for j in range(2))
    assert sum(y[i] * b[i] for i in range(1)) > 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 4), min_size=5, max_size=5), min_size=2, max_size=3),
       st.lists(st.integers(0, 3), min_size=5, max_size=5), st.lists(small, min_size=5, max_size=5))
def test_simplex_against_scipy(a, x0, c):
    from scipy.optimize import linprog
    b = matvec(a, x0)
    res = simplex_solve(LpProblem(a, b, c))
    ref = linprog(c, A_eq=a, b_eq=[float(v) for v in b], bounds=[(0, None)] * 5, method="highs")
    if ref.status == 3:
        assert isinstance(res, Unbounded)
    else:
        assert isinstance(res, Optimal)
        assert abs(float(res.value) - ref.fun) < 1e-7
        assert matvec(a, res.x) == b and min(res.x) >= 0


def test_strictly_feasible_point():
    p = strictly_feasible_point([[1, 0], [0, 1]])
    assert p is not None and p[0] > 0 and p[1] > 0
    assert strictly_feasible_point([[1, 0], [-1, 0]]) is None
