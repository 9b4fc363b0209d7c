from fractions import Fraction
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistperiod.connection import ExponentData
from twistperiod.geometry import AffineFunctional, Arrangement
from twistperiod.rdbasis import (
    LINEAR,
    QUADRATIC,
    PhaseSpec,
    PreconditionError,
    default_R,
    rank_cross_check,
    rd_basis,
    rd_basis_linear,
    rd_basis_quadratic,
    stability_check,
)
from twistperiod.suite import random_general_position

F = Fraction
THREE_LINES = Arrangement.from_rows([(0, 0, 1), (-1, 1, 1), (-2, 1, -1)])
GENERIC3 = ExponentData.scalar([F(1, 5), F(1, 7), F(1, 11)])


def test_kummer_rank_two(unit_interval):
    E = ExponentData.scalar([F(1, 2), F(1, 3)])
    basis = rd_basis_linear(unit_interval, E, AffineFunctional((0, 1)))
    assert basis.rank == 2 and len(basis.bounded) == 1 and len(basis.truncated) == 1
    assert basis.truncated[0].chamber.sign == (1, -1)
    assert basis.R == default_R(unit_interval, basis.phase) == 4


def test_three_points_on_line():
    A = Arrangement.from_rows([(0, 1), (-1, 1), (-2, 1)])
    E = ExponentData.scalar([F(1, 2), F(1, 3), F(1, 5)])
    phase = PhaseSpec(LINEAR, AffineFunctional((0, 1)))
    rep = rank_cross_check(A, E, phase)
    assert rep["basis_rank"] == 3 and rep["b(A)"] == 2 and rep["b(slice)"] == 1


def test_three_lines_linear():
    phase = PhaseSpec(LINEAR, AffineFunctional((0, 1, 0)))
    rep = rank_cross_check(THREE_LINES, GENERIC3, phase)
    assert rep["ok"] and rep["basis_rank"] == 3 and rep["b(A)"] == 1 and rep["b(slice)"] == 2


def test_three_lines_quadratic():
    rep = rank_cross_check(THREE_LINES, GENERIC3, PhaseSpec(QUADRATIC))
    assert rep["basis_rank"] == 7 and rep["M(N,n)"] == 6


def test_four_lines_quadratic():
    A = Arrangement.from_rows([(0, 0, 1), (-1, 1, 1), (-2, 1, -1), (-3, 1, 0)])
    E = ExponentData.scalar([F(1, 5), F(1, 7), F(1, 11), F(1, 13)])
    rep = rank_cross_check(A, E, PhaseSpec(QUADRATIC))
    assert (rep["basis_rank"], rep["b(A)"], rep["M(N,n)"]) == (11, 3, 8)


def test_interval_quadratic(unit_interval):
    basis = rd_basis_quadratic(unit_interval, ExponentData.scalar([F(1, 2), F(1, 3)]))
    assert basis.rank == 3
    assert basis.hypotheses["normal_crossing_at_infinity"] == "assumed"


def test_stability_doubling_R():
    for phase in (PhaseSpec(LINEAR, AffineFunctional((0, 1, 0))), PhaseSpec(QUADRATIC)):
        assert stability_check(THREE_LINES, GENERIC3, phase)["stable"]


def test_in_degree_concentrated():
    basis = rd_basis(THREE_LINES, GENERIC3, PhaseSpec(LINEAR, AffineFunctional((0, 1, 0))))
    assert basis.in_degree(1, 2) == [] and len(basis.in_degree(2, 2)) == 3


def test_preconditions(unit_interval):
    f = AffineFunctional((0, 1))
    with pytest.raises(PreconditionError) as exc:
        rd_basis_linear(unit_interval, ExponentData.scalar([F(2), F(1, 3)]), f)
    assert exc.value.reason == "genericity: integer eigenvalue at j=1"
    bad = ExponentData.scalar([F(1, 2), F(1, 4), F(1, 4)])
    with pytest.raises(PreconditionError) as exc:
        rd_basis_linear(THREE_LINES, bad, AffineFunctional((0, 1, 0)))
    assert exc.value.reason.endswith("j=inf")
    with pytest.raises(PreconditionError):
        rd_basis_quadratic(unit_interval, ExponentData.scalar([F(1, 2), F(1, 3)]), R=F(1, 4))
    with pytest.raises(ValueError):
        PhaseSpec(LINEAR, AffineFunctional((1, 0)))
    with pytest.raises(ValueError):
        PhaseSpec("cubic")


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(3, 5))
def test_random_linear_rank_matches_prediction(seed, N):
    rng = random.Random(seed)
    A = random_general_position(rng, 2, N)
    E = ExponentData.scalar([F(1, p) for p in (3, 5, 7, 11, 13)[:N]])
    f = AffineFunctional((0, F(rng.randint(1, 5)), F(rng.randint(-5, 5), 7)))
    try:
        rep = rank_cross_check(A, E, PhaseSpec(LINEAR, f))
    except PreconditionError:
        return
    assert rep["ok"]
