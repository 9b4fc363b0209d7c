from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from twistperiod.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp, solve_lp_free


def test_textbook_optimum():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
    r = solve_lp([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert r.status == OPTIMAL
    assert r.value == 36
    assert r.x == (Fraction(2), Fraction(6))


def test_negative_rhs_needs_phase_one():
    # x + y >= 2 written as -x - y <= -2, minimise x + y
    r = solve_lp([-1, -1], [[-1, -1]], [-2])
    assert r.status == OPTIMAL and r.value == -2


def test_infeasible_and_unbounded():
    assert solve_lp([1], [[1], [-1]], [1, -2]).status == INFEASIBLE
    assert solve_lp([1, 0], [[0, 1]], [1]).status == UNBOUNDED


def test_free_variable():
    # max -x with x >= -3 and x free
    r = solve_lp_free([-1], [[-1]], [3], [True])
    assert r.status == OPTIMAL and r.x == (Fraction(-3),)


def test_degenerate_problem_terminates():
    # several constraints tight at the optimum: Bland's rule must not cycle
    A = [[1, 1], [1, 2], [2, 1], [1, -1], [-1, 1]]
    r = solve_lp([1, 1], A, [2, 3, 3, 0, 0])
    assert r.status == OPTIMAL and r.value == 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=2, max_size=2), min_size=1, max_size=5),
       st.lists(st.integers(0, 6), min_size=5, max_size=5),
       st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_optimum_is_feasible_and_not_beaten_on_a_grid(A, b, c):
    b = b[: len(A)]
    r = solve_lp(c, A, b)
    # b >= 0 so the origin is feasible: never infeasible
    assert r.status in (OPTIMAL, UNBOUNDED)
    if r.status == OPTIMAL:
        x = np.array([float(v) for v in r.x])
        assert all(v >= 0 for v in r.x)
        assert all(sum(a * v for a, v in zip(row, r.x)) <= bi for row, bi in zip(A, b))
        for gx in range(0, 7):
            for gy in range(0, 7):
                if all(row[0] * gx + row[1] * gy <= bi for row, bi in zip(A, b)):
                    assert c[0] * gx + c[1] * gy <= r.value
        assert abs(float(r.value) - float(np.dot(c, x))) < 1e-12
