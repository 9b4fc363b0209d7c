import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistperiod.special import SeriesDomainError, beta, gamma, gauss_2f1, kummer_1f1


def test_gamma_known_values():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(5) == pytest.approx(24, rel=1e-14)
    assert gamma(-0.5) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-13)
    with pytest.raises(ValueError):
        gamma(-2)


@settings(max_examples=60, deadline=None)
@given(st.floats(-6, 6).filter(lambda z: min(abs(z - round(z)), 1) > 1e-3),
       st.floats(-2, 2))
def test_gamma_recurrence(x, y):
    z = complex(x, y)
    assert abs(gamma(z + 1) - z * gamma(z)) <= 1e-13 * max(1, abs(gamma(z + 1)))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.99))
def test_gamma_reflection(x):
    assert abs(gamma(x) * gamma(1 - x) * math.sin(math.pi * x) - math.pi) < 1e-13 * math.pi


def test_beta_and_hypergeometric_values():
    assert beta(-0.5, 2) == pytest.approx(-4, rel=1e-13)
    assert gauss_2f1(1, 1, 2, 0.5) == pytest.approx(2 * math.log(2), rel=1e-14)
    assert kummer_1f1(1, 2, 1) == pytest.approx(math.e - 1, rel=1e-14)
    assert gauss_2f1(0.5, 1 / 3, 1.5, 0.25) == pytest.approx(1.03101755100368503, rel=1e-14)
    assert kummer_1f1(0.5, 1.5, -1) == pytest.approx(0.746824132812427025, rel=1e-14)
    assert gauss_2f1(1, 2, 3, 0) == 1


def test_series_domain_errors():
    with pytest.raises(SeriesDomainError):
        gauss_2f1(1, 1, 2, 0.95)
    with pytest.raises(SeriesDomainError):
        gauss_2f1(1, 1, -2, 0.1)
    with pytest.raises(SeriesDomainError):
        kummer_1f1(1, 0, 1)
