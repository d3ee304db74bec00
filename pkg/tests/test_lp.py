from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from ergm_exact.lp import check_result, lp_solve


def test_single_equality():
    res = lp_solve([1], [[1]], [1])
    assert res.status == "optimal" and res.x == (1,) and res.value == 1


def test_max_min_weight_two_points():
    # variables l1, l2, eps free; s1, s2 >= 0 with l_i - eps - s_i = 0
    a = [
        [1, 1, 0, 0, 0],
        [0, 1, 0, 0, 0],
        [1, 0, -1, -1, 0],
        [0, 1, -1, 0, -1],
    ]
    res = lp_solve([0, 0, 1, 0, 0], a, [1, F(1, 2), 0, 0], [None, None, None, 0, 0])
    assert res.status == "optimal"
    assert res.value == F(1, 2)
    assert res.x[:2] == (F(1, 2), F(1, 2))


def test_contradictory_equalities():
    a, b = [[1], [1]], [1, 0]
    res = lp_solve([0], a, b)
    assert res.status == "infeasible"
    check_result(res, [0], a, b)


def test_unbounded_ray():
    a, b = [[1, -1]], [0]
    res = lp_solve([1, 0], a, b)
    assert res.status == "unbounded"
    check_result(res, [1, 0], a, b)


def test_free_variable_farkas_column_is_zero():
    # x free, y >= 0: x + y = 1, x + y = 2
    a, b = [[1, 1], [1, 1]], [1, 2]
    res = lp_solve([0, 0], a, b, [None, 0])
    assert res.status == "infeasible"
    check_result(res, [0, 0], a, b, [None, 0])


def test_lower_bounds_shift():
    # x >= 2, y >= -1, x + y = 3, maximize y
    res = lp_solve([0, 1], [[1, 1]], [3], [2, -1])
    assert res.status == "optimal" and res.x == (2, 1)


def test_redundant_rows_are_dropped():
    a = [[1, 1, 1], [2, 2, 2], [1, 0, -1]]
    res = lp_solve([1, 2, 3], a, [1, 2, 0])
    assert res.status == "optimal"
    check_result(res, [1, 2, 3], a, [1, 2, 0])
    assert res.value == 2


# classic problems on which the largest-coefficient rule cycles
DEGENERATE = {
    "beale": (
        [F(3, 4), -150, F(1, 50), -6],
        [[F(1, 4), -60, F(-1, 25), 9], [F(1, 2), -90, F(-1, 50), 3], [0, 0, 1, 0]],
        [0, 0, 1],
    ),
    "kuhn": (
        [2, 3, -1, -12],
        [[-2, -9, 1, 9], [F(1, 3), 1, F(-1, 3), -2], [2, 3, -1, -12]],
        [0, 0, 2],
    ),
    "marshall_suurballe": (
        [F(2, 5), F(2, 5), F(-9, 5)],
        [[F(3, 5), F(-32, 5), F(24, 5)], [F(1, 5), F(-9, 5), F(3, 5)], [F(2, 5), F(-8, 5), F(1, 5)], [0, 1, 0]],
        [0, 0, 0, 1],
    ),
}


def _with_slacks(c, a, b):
    m = len(a)
    rows = [list(r) + [1 if i == j else 0 for j in range(m)] for i, r in enumerate(a)]
    return list(c) + [0] * m, rows, list(b)


@pytest.mark.parametrize("name", sorted(DEGENERATE))
def test_degenerate_suite_terminates_at_optimum(name):
    c, a, b = DEGENERATE[name]
    cs, rows, rhs = _with_slacks(c, a, b)
    res = lp_solve(cs, rows, rhs)
    assert res.status == "optimal"
    check_result(res, cs, rows, rhs)
    ref = linprog(-np.array(c, float), A_ub=np.array(a, float), b_ub=np.array(b, float), method="highs")
    assert float(res.value) == pytest.approx(-ref.fun, abs=1e-9)


def test_beale_exact_optimum():
    c, a, b = DEGENERATE["beale"]
    res = lp_solve(*_with_slacks(c, a, b))
    assert res.value == F(1, 20)


def test_many_zero_rhs_degenerate_vertex():
    # A x <= 0 plus sum(x) <= 5: the origin is a highly degenerate vertex
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.integers(-3, 4, size=(4, 7)).tolist() + [[1] * 7]
        cs, rows, rhs = _with_slacks(rng.integers(-2, 3, size=7).tolist(), a, [0, 0, 0, 0, 5])
        res = lp_solve(cs, rows, rhs)
        assert res.status == "optimal"
        check_result(res, cs, rows, rhs)


small = st.integers(-4, 4)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3).flatmap(lambda m: st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(small, min_size=n, max_size=n),
    st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m),
    st.lists(small, min_size=m, max_size=m),
))))
def test_random_lps_agree_with_highs(data):
    c, a, b = data
    res = lp_solve(c, a, b)
    check_result(res, c, a, b)
    ref = linprog(-np.array(c, float), A_eq=np.array(a, float), b_eq=np.array(b, float),
                  bounds=[(0, None)] * len(c), method="highs")
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert res.status == expected
    if expected == "optimal":
        assert float(res.value) == pytest.approx(-ref.fun, abs=1e-7)
