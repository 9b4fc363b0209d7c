from fractions import Fraction

import pytest

from twistperiod.geometry import Arrangement


@pytest.fixture
def triangle():
    """t1 > 0, t2 > 0, 1 - t1 - t2 > 0 and the six unbounded chambers around it."""
    return Arrangement.from_rows([(0, 1, 0), (0, 0, 1), (1, -1, -1)])


@pytest.fixture
def unit_interval():
    return Arrangement.from_rows([(0, 1), (1, -1)])


def F(p, q=1):
    return Fraction(p, q)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
