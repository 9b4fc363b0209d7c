"""The twelve acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed in the terminal summary
(see conftest.py), in addition to the normal pytest verdict.
"""

import math
import time
from fractions import Fraction

from twistperiod import suite
from twistperiod.chambers import schlafli_bounded_count
from twistperiod.validation import HgParams, confluence_check, verify_euler_integral, verify_kummer_integral

F = Fraction
RESULTS = []

# independent 30-digit reference values
EULER_REF = 2.06203510200737006355882833188
EULER_NEG_REF = -3.88483498495529757745936900241
KUMMER_REF = 1.49364826562485405079893487226


def _record(name, ok, detail):
    line = "%s criterion %s: %s" % ("PASS" if ok else "FAIL", name, detail)
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_01_chamber_oracle():
    t = time.perf_counter()
    ok, detail = suite.check_chamber_oracle(count=50)
    _record("1 chamber oracle", ok and time.perf_counter() - t < 30, detail)


def test_02_general_position_counts():
    _record("2 general-position counts", *suite.check_general_position_counts(count=20))


def test_03_schlafli():
    ok, detail = suite.check_schlafli()
    closed = all(schlafli_bounded_count(N, n) == math.comb(N - 1, n - 1) + sum(math.comb(N, n - i) for i in range(1, n + 1))
                 for N in range(1, 9) for n in range(1, 4))
    _record("3 Schlafli count", ok and closed, detail)


def test_04_rank_identities():
    _record("4 rank identities", *suite.check_rank_identities())


def test_05_morse():
    t = time.perf_counter()
    ok, detail = suite.check_morse(count=10)
    _record("5 Morse count", ok and time.perf_counter() - t < 10, detail)


def test_06_euler():
    t = time.perf_counter()
    ok, detail = suite.check_euler()
    base = verify_euler_integral(HgParams(F(1, 2), F(1, 3), F(3, 2), F(1, 4)))["value"]
    neg = verify_euler_integral(HgParams(F(-1, 2), F(1, 3), F(3, 2), F(1, 4)))["value"]
    ref = max(abs(base - EULER_REF) / EULER_REF, abs(neg - EULER_NEG_REF) / abs(EULER_NEG_REF))
    sweep_ok = all(abs(p.x) <= F(1, 2) for p in suite.euler_sweep_points()) and len(suite.euler_sweep_points()) == 10
    _record("6 Euler integral", ok and ref < 1e-8 and sweep_ok and time.perf_counter() - t < 20,
            "%s; vs reference %.1e" % (detail, ref))


def test_07_kummer():
    r = verify_kummer_integral(F(1, 2), F(3, 2), 1)
    ref = abs(r["bounded_value"] - KUMMER_REF) / KUMMER_REF
    _record("7 Kummer integral", r["residual"] < 1e-8 and ref < 1e-8 and abs(r["det"]) > 1e-10,
            "residual %.1e, vs reference %.1e, |det| %.3f" % (r["residual"], ref, abs(r["det"])))


def test_08_ode():
    _record("8 ODE systems", *suite.check_ode())


def test_09_monodromy():
    _record("9 monodromy", *suite.check_monodromy())


def test_10_regularization_robustness():
    _record("10 regularization robustness", *suite.check_regularization_robustness())


def test_11_confluence():
    r = confluence_check(F(1, 2), F(3, 2), 1, [F(1, 16), F(1, 64), F(1, 256)])
    _record("11 confluence", r["decreasing"], "gaps %s" % ", ".join("%.2e" % g for g in r["gaps"]))


def test_12_cli():
    _record("12 CLI end-to-end", *suite.check_cli())
