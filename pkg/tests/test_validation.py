from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistperiod.rdbasis import PreconditionError
from twistperiod.validation import (
    HgParams,
    confluence_check,
    gauss_contiguous_residual,
    kummer_contiguous_residual,
    kummer_periods,
    ode_residual,
    pointwise_confluence_gap,
    verify_euler_integral,
    verify_kummer_integral,
)

F = Fraction

# independent 30-digit reference values
EULER_HALF_THIRD = 2.06203510200737006355882833188
EULER_NEGATIVE = -3.88483498495529757745936900241
KUMMER_BOUNDED = 1.49364826562485405079893487226


def test_euler_reference_values():
    r = verify_euler_integral(HgParams(F(1, 2), F(1, 3), F(3, 2), F(1, 4)))
    assert abs(r["value"] - EULER_HALF_THIRD) < 1e-12 * EULER_HALF_THIRD
    assert r["residual"] < 1e-10
    r = verify_euler_integral(HgParams(F(-1, 2), F(1, 3), F(3, 2), F(1, 4)))
    assert abs(r["value"] - EULER_NEGATIVE) < 1e-11 * abs(EULER_NEGATIVE)


def test_euler_preconditions():
    with pytest.raises(PreconditionError):
        verify_euler_integral(HgParams(F(-1), F(1, 3), F(1, 2), F(1, 4)))
    with pytest.raises(PreconditionError):
        verify_euler_integral(HgParams(F(1, 2), F(1, 3), F(1, 2), F(1, 4)))
    with pytest.raises(PreconditionError):
        verify_euler_integral(HgParams(F(1, 2), F(1, 3), F(3, 2), (F(1, 4), F(1))))


def test_kummer_reference_and_rank():
    r = verify_kummer_integral(F(1, 2), F(3, 2), 1)
    assert abs(r["bounded_value"] - KUMMER_BOUNDED) < 1e-12
    assert r["residual"] < 1e-10 and r["rank2"]
    P = r["period_matrix"]
    assert np.allclose(P, [[1.49364827, 1.11470357], [0.27880559, -0.22847665]], atol=1e-8)
    with pytest.raises(PreconditionError):
        kummer_periods(F(1, 2), F(3, 2), F(-1))


def test_kummer_periods_independent_of_R():
    P1 = kummer_periods(F(1, 3), F(5, 4), F(2), R=F(10))
    P2 = kummer_periods(F(1, 3), F(5, 4), F(2), R=F(30))
    assert np.allclose(P1, P2, rtol=1e-11, atol=0)


@pytest.mark.parametrize("system,params", [
    ("gauss", (F(1, 2), F(1, 3), F(3, 2))),
    ("kummer", (F(1, 2), F(3, 2))),
    ("kummer_unbounded", (F(1, 2), F(3, 2))),
])
def test_ode_residual_small(system, params):
    x0 = F(1, 4) if system == "gauss" else F(1)
    assert ode_residual(system, params, x0, F(1, 1000)) < 1e-6


def test_ode_residual_fourth_order():
    p = (F(1, 2), F(1, 3), F(3, 2))
    r1 = ode_residual("gauss", p, F(1, 4), F(1, 20))
    r2 = ode_residual("gauss", p, F(1, 4), F(1, 40))
    assert 3.5 < np.log2(r1 / r2) < 4.5


def test_ode_errors():
    with pytest.raises(PreconditionError):
        ode_residual("gauss", (F(1, 2), F(1, 3), F(3, 2)), F(0), F(1, 40))
    with pytest.raises(PreconditionError):
        ode_residual("kummer", (F(1, 2), F(3, 2)), F(-1), F(1, 40))
    with pytest.raises(ValueError):
        ode_residual("heun", (), F(1, 2), F(1, 40))


def test_confluence():
    r = confluence_check(F(1, 2), F(3, 2), F(1), [F(1, 4), F(1, 8), F(1, 16), F(1, 32)])
    assert r["decreasing"]
    assert abs(r["kummer_value"] - KUMMER_BOUNDED) < 1e-12
    assert r["gaps"][-1] < r["gaps"][0] / 4
    with pytest.raises(ValueError):
        confluence_check(F(1, 2), F(3, 2), F(1), [F(1, 8), F(1, 4)])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.5), st.floats(0.1, 2), st.floats(0, 1))
def test_pointwise_confluence_gap_shrinks(eps, xt, t):
    assert pointwise_confluence_gap(eps / 2, xt, t) <= pointwise_confluence_gap(eps, xt, t) + 1e-15


@settings(max_examples=40, deadline=None)
@given(st.floats(-2.3, 2.3), st.floats(-2.3, 2.3), st.floats(0.3, 3.3), st.floats(-0.8, 0.8))
def test_contiguous_relations(a, b, c, z):
    assert gauss_contiguous_residual(a, b, c, z) < 1e-11
    assert kummer_contiguous_residual(a, c, 3 * z) < 1e-11


def test_pointwise_confluence_reference():
    assert pointwise_confluence_gap(F(1, 256), 1, 1) < 3e-3
