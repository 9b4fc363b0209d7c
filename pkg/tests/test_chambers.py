import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistperiod.chambers import (
    brute_force_chambers,
    enumerate_chambers,
    general_position_counts,
    morse_critical_point,
    morse_critical_points,
    morse_gradient,
    schlafli_bounded_count,
    unbounded_equals_schlafli_check,
)
from twistperiod.geometry import Arrangement, GeometryError, sign_vector_of
from twistperiod.suite import random_general_position


def test_two_points_on_a_line(unit_interval):
    c = enumerate_chambers(unit_interval)
    assert (c.n_total, c.n_bounded) == (3, 1)
    assert [ch.sign for ch in c.chambers] == [(-1, 1), (1, -1), (1, 1)]
    assert c.by_sign((1, 1)).bounded


def test_three_and_four_lines(triangle):
    c = enumerate_chambers(triangle)
    assert (c.n_total, c.n_bounded) == (7, 1)
    four = Arrangement.from_rows([(0, 1, 0), (0, 0, 1), (1, -1, -1), (-3, 1, 2)])
    c4 = enumerate_chambers(four)
    assert (c4.n_total, c4.n_bounded) == (11, 3)


def test_non_general_position_counts():
    # two parallel lines crossed by one: 6 chambers, none bounded
    A = Arrangement.from_rows([(0, 1, 0), (-1, 1, 0), (0, 0, 1)])
    c = enumerate_chambers(A)
    assert (c.n_total, c.n_bounded) == (6, 0)
    # three concurrent lines: 6 chambers, none bounded
    B = Arrangement.from_rows([(0, 1, 0), (0, 0, 1), (0, 1, 1)])
    assert enumerate_chambers(B).n_total == 6


def test_ids_are_lexicographic(triangle):
    c = enumerate_chambers(triangle)
    assert [ch.id for ch in c.chambers] == list(range(7))
    assert [ch.sign for ch in c.chambers] == sorted(ch.sign for ch in c.chambers)


def test_closed_forms():
    assert general_position_counts(3, 2) == (7, 1)
    assert general_position_counts(4, 2) == (11, 3)
    for N in range(2, 8):
        assert schlafli_bounded_count(N, 2) == 2 * N
        assert schlafli_bounded_count(N, 1) == 2
    with pytest.raises(ValueError):
        schlafli_bounded_count(0, 2)


def test_unbounded_count_matches_schlafli(triangle):
    assert unbounded_equals_schlafli_check(triangle)
    with pytest.raises(GeometryError):
        unbounded_equals_schlafli_check(Arrangement.from_rows([(0, 1, 0), (1, 1, 0)]))


rows_strategy = st.lists(st.tuples(*(st.integers(-3, 3) for _ in range(3))), min_size=1, max_size=5)


@settings(max_examples=40, deadline=None)
@given(rows_strategy)
def test_incremental_matches_brute_force(rows):
    rows = [r for r in rows if r[1] or r[2]]
    try:
        A = Arrangement.from_rows(rows)
    except GeometryError:
        return
    inc = enumerate_chambers(A)
    ref = brute_force_chambers(A)
    assert [c.sign for c in inc.chambers] == [c.sign for c in ref.chambers]
    assert [c.bounded for c in inc.chambers] == [c.bounded for c in ref.chambers]
    for ch in inc.chambers:
        assert sign_vector_of(A, ch.witness) == ch.sign


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**6))
def test_general_position_counts_property(n, seed):
    rng = random.Random(seed)
    N = rng.randint(n, 6)
    A = random_general_position(rng, n, N)
    c = enumerate_chambers(A)
    assert (c.n_total, c.n_bounded) == general_position_counts(N, n)
    assert c.n_unbounded == schlafli_bounded_count(N, n)


def test_morse_triangle(triangle):
    c = enumerate_chambers(triangle)
    ch = c.by_sign((1, 1, 1))
    p = morse_critical_point(triangle, ch, [1, 1, 1])
    assert all(abs(x - Fraction(1, 3)) < Fraction(1, 10**14) for x in p)


def test_morse_weighted_interval(unit_interval):
    # eta1 log t + eta2 log(1 - t) peaks at eta1 / (eta1 + eta2)
    ch = enumerate_chambers(unit_interval).by_sign((1, 1))
    p = morse_critical_point(unit_interval, ch, [Fraction(1), Fraction(3)])
    assert abs(float(p[0]) - 0.25) < 1e-15
    assert all(abs(float(g)) < 1e-12 for g in morse_gradient(unit_interval, [1, 3], p))


def test_morse_counts_and_rejections(triangle):
    A = Arrangement.from_rows([(0, 1, 0), (0, 0, 1), (1, -1, -1), (-3, 1, 2)])
    pts = morse_critical_points(A, [1, 2, 1, 1])
    assert len(pts) == 3
    assert len({cid for _, cid in pts}) == 3
    with pytest.raises(ValueError):
        morse_critical_points(A, [1, -1, 1, 1])
    with pytest.raises(GeometryError):
        morse_critical_points(Arrangement.from_rows([(0, 1, 0), (0, 0, 1)]), [1, 1])
