from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistperiod.geometry import (
    AffineFunctional,
    Arrangement,
    GeometryError,
    InfeasibleSignVector,
    NonTransversalSlice,
    affine_flats,
    flats_up_to_codim2,
    is_boolean_through_origin,
    rank,
    recession_cone_trivial,
    recession_direction,
    sign_vector_feasible,
    sign_vector_of,
    slice_arrangement,
    vertices,
)


def test_rejects_bad_input():
    with pytest.raises(GeometryError):
        Arrangement.from_rows([(1, 0, 0)])
    with pytest.raises(GeometryError):
        Arrangement.from_rows([(0, 1), (0, 2)])
    with pytest.raises(GeometryError):
        Arrangement(2, ((0, 1),))


def test_feasibility_witness_is_strict(triangle):
    w = sign_vector_feasible(triangle, (1, 1, 1))
    assert w is not None and sign_vector_of(triangle, w) == (1, 1, 1)
    # t1 < 0, t2 < 0 forces 1 - t1 - t2 > 0
    assert sign_vector_feasible(triangle, (-1, -1, -1)) is None


def test_recession_cone(triangle):
    assert recession_cone_trivial(triangle, (1, 1, 1))
    assert not recession_cone_trivial(triangle, (1, 1, -1))
    d = recession_direction(triangle, (1, -1, 1))
    assert d is not None
    with pytest.raises(InfeasibleSignVector):
        recession_cone_trivial(triangle, (-1, -1, -1))


def test_flats_of_triangle(triangle):
    fl = flats_up_to_codim2(triangle)
    assert sorted(f.codim for f in fl) == [1, 1, 1, 2, 2, 2]
    assert all(f.is_maximal for f in fl)


def test_flats_with_triple_point():
    # three lines through the origin: a single codimension-2 flat of size 3
    A = Arrangement.from_rows([(0, 1, 0), (0, 0, 1), (0, 1, 1)])
    codim2 = [f for f in flats_up_to_codim2(A) if f.codim == 2]
    assert len(codim2) == 1 and codim2[0].closure == frozenset({0, 1, 2})
    assert not is_boolean_through_origin(A)


def test_parallel_lines_not_in_general_position():
    A = Arrangement.from_rows([(0, 1, 0), (1, 1, 0), (0, 0, 1)])
    assert not is_boolean_through_origin(A, coned=True)
    assert not is_boolean_through_origin(A, coned=False)
    assert is_boolean_through_origin(Arrangement.from_rows([(0, 1, 0), (0, 0, 1), (1, -1, -1)]))


def test_vertices(triangle):
    assert vertices(triangle) == [(0, 0), (0, 1), (1, 0)]


def test_slice_of_three_lines():
    A = Arrangement.from_rows([(0, 0, 1), (-1, 1, 1), (-2, 1, -1)])
    sl = slice_arrangement(A, AffineFunctional((0, 1, 0)), 10)
    assert sl.arrangement.dim == 1 and len(sl.arrangement) == 3
    # every induced point embeds onto its ambient line
    for i, h in enumerate(sl.arrangement.hyperplanes):
        q = (-h.const / h.normal[0],)
        p = sl.embed(q)
        assert p[0] == 10
        amb = A.hyperplanes[sl.kept[i]]
        assert amb.const + sum(a * x for a, x in zip(amb.normal, p)) == 0


def test_slice_drops_parallel_and_detects_vertex():
    A = Arrangement.from_rows([(0, 1, 0), (0, 0, 1)])
    sl = slice_arrangement(A, AffineFunctional((0, 1, 0)), 3)
    assert sl.parallel == (0,) and sl.kept == (1,)
    with pytest.raises(NonTransversalSlice):
        slice_arrangement(A, AffineFunctional((0, 1, 1)), 0)
    with pytest.raises(NonTransversalSlice):
        slice_arrangement(A, AffineFunctional((0, 1, 0)), 0)


def test_affine_flats_parallel_family():
    A = Arrangement.from_rows([(0, 1, 0), (1, 1, 0), (0, 0, 1)])
    codims = sorted(f.codim for f in affine_flats(A))
    assert codims == [1, 1, 1, 2, 2]


coeff = st.integers(-5, 5)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coeff, coeff, coeff), min_size=1, max_size=5), st.lists(st.sampled_from([-1, 1]), min_size=5, max_size=5))
def test_feasibility_agrees_with_witness(rows, signs):
    rows = [r for r in rows if r[1] or r[2]]
    try:
        A = Arrangement.from_rows(rows)
    except GeometryError:
        return
    s = tuple(signs[: len(A)])
    w = sign_vector_feasible(A, s)
    if w is not None:
        assert sign_vector_of(A, w) == s


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=4))
def test_rank_bounds(rows):
    r = rank(rows)
    assert 0 <= r <= min(len(rows), 3)
    assert rank(rows + rows) == r
    assert rank([[Fraction(2) * x for x in row] for row in rows]) == r
