"""Built-in battery behind ``twistperiod verify-suite``.

Each check returns ``(name, passed, detail)``.  Sizes are kept small so the
whole battery runs in well under a minute.
"""

from __future__ import annotations

import cmath
import json
import math
import os
import random
import tempfile
import time
from fractions import Fraction
from math import comb

from .chambers import (
    brute_force_chambers,
    enumerate_chambers,
    general_position_counts,
    morse_critical_points,
    morse_gradient,
    schlafli_bounded_count,
)
from .connection import ExponentData
from .geometry import AffineFunctional, Arrangement, GeometryError, is_boolean_through_origin, sign_vector_of
from .quadrature import TwistedIntegrand
from .rdbasis import LINEAR, QUADRATIC, PhaseSpec, rank_cross_check, rd_basis_linear, rd_basis_quadratic
from .regularization import LOOP, regularize_bounded
from .validation import (
    HgParams,
    confluence_check,
    ode_residual,
    verify_euler_integral,
    verify_kummer_integral,
)


def random_arrangement(rng: random.Random, n: int, N: int, lo=-4, hi=4) -> Arrangement:
    """Random integer arrangement with nonzero normals and distinct hyperplanes."""
    while True:
        rows = []
        for _ in range(N):
            while True:
                row = [rng.randint(lo, hi) for _ in range(n + 1)]
                if any(row[1:]):
                    break
            rows.append(row)
        try:
            return Arrangement.from_rows(rows)
        except GeometryError:
            continue


def random_general_position(rng: random.Random, n: int, N: int) -> Arrangement:
    while True:
        A = random_arrangement(rng, n, N, -9, 9)
        if is_boolean_through_origin(A, coned=True):
            return A


def circle_arc_count(A: Arrangement):
    """Arcs cut on a large circle by the lines, and the sign vectors of their midpoints.

    Outside a disc containing every vertex each unbounded chamber meets the
    circle in exactly one arc.
    """
    from .geometry import vertices

    r = 2.0 + 2.0 * max((math.hypot(float(v[0]), float(v[1])) for v in vertices(A)), default=0.0)
    angles = []
    for h in A.hyperplanes:
        a0, a1, a2 = (float(c) for c in h.coeffs)
        nrm = math.hypot(a1, a2)
        # a1 r cos t + a2 r sin t = -a0
        phi = math.atan2(a2, a1)
        delta = math.acos(max(-1.0, min(1.0, -a0 / (r * nrm))))
        angles += [(phi + delta) % (2 * math.pi), (phi - delta) % (2 * math.pi)]
    angles.sort()
    signs = set()
    for k, a in enumerate(angles):
        b = angles[(k + 1) % len(angles)] + (2 * math.pi if k + 1 == len(angles) else 0.0)
        m = 0.5 * (a + b)
        p = (Fraction(r * math.cos(m)), Fraction(r * math.sin(m)))
        signs.add(sign_vector_of(A, p))
    return len(angles), signs


def check_chamber_oracle(count=50, seed=1):
    rng = random.Random(seed)
    t = time.perf_counter()
    for _ in range(count):
        n = rng.randint(1, 3)
        N = rng.randint(1, 8 if n < 3 else 7)
        A = random_arrangement(rng, n, N)
        a = sorted(c.sign for c in enumerate_chambers(A).chambers)
        b = sorted(c.sign for c in brute_force_chambers(A).chambers)
        if a != b:
            return False, "mismatch on %r" % (A.rows(),)
    dt = time.perf_counter() - t
    return dt < 30, "%d arrangements, %.1fs" % (count, dt)


def check_general_position_counts(count=20, seed=2):
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(1, 3)
        N = rng.randint(n, 7)
        A = random_general_position(rng, n, N)
        c = enumerate_chambers(A)
        if (c.n_total, c.n_bounded) != (sum(comb(N, i) for i in range(n + 1)), comb(N - 1, n)):
            return False, "counts differ for N=%d n=%d" % (N, n)
        if general_position_counts(N, n) != (c.n_total, c.n_bounded):
            return False, "closed form differs"
    return True, "%d instances" % count


def check_schlafli():
    for N in range(2, 7):
        A = random_general_position(random.Random(1000 + N), 2, N)
        c = enumerate_chambers(A)
        arcs, signs = circle_arc_count(A)
        unbounded = {ch.sign for ch in c.chambers if not ch.bounded}
        if not (schlafli_bounded_count(N, 2) == 2 * N == arcs == len(signs) and signs == unbounded):
            return False, "N=%d: arcs %d, M %d" % (N, arcs, schlafli_bounded_count(N, 2))
        M = comb(N - 1, 1) + sum(comb(N, 2 - i) for i in range(1, 3))
        if M != schlafli_bounded_count(N, 2):
            return False, "closed form differs at N=%d" % N
    return True, "N=2..6, arcs = 2N = unbounded chambers"


def _rank_instances():
    rng = random.Random(4)
    out = [random_general_position(rng, 2, N) for N in (3, 4, 5)]
    out.append(random_general_position(rng, 1, 3))
    return out


def _generic_exponents(N, seed):
    rng = random.Random(seed)
    return ExponentData.scalar([Fraction(rng.choice([1, 2, 3, 4, 5, 6]), 7) + rng.randint(-1, 1) for _ in range(N)])


def check_rank_identities():
    details = []
    for k, A in enumerate(_rank_instances()):
        E = _generic_exponents(len(A), k)
        f = AffineFunctional(tuple([Fraction(0)] + [Fraction(1)] + [Fraction(k + 2, 3)] * (A.dim - 1)))
        c = enumerate_chambers(A)
        b = rd_basis_linear(A, E, f, census=c, check=False)
        r = rank_cross_check(A, E, PhaseSpec(LINEAR, f, b.R), b, c)
        q = rd_basis_quadratic(A, E, census=c, check=False)
        rq = rank_cross_check(A, E, PhaseSpec(QUADRATIC, None, q.R), q, c)
        if not (r["ok"] and rq["ok"] and q.rank == c.n_total):
            return False, "instance %d" % k
        details.append("%d+%d" % (r["b(A)"], r["b(slice)"]))
    A = Arrangement.from_rows([(0, 1), (1, -1)])
    kb = rd_basis_linear(A, ExponentData.scalar([Fraction(1, 2), Fraction(1, 3)]), AffineFunctional((0, 1)))
    if kb.rank != 2:
        return False, "Kummer rank %d" % kb.rank
    return True, "linear ranks %s; Kummer rank 2" % ",".join(details)


def check_morse(count=10):
    rng = random.Random(5)
    t = time.perf_counter()
    for _ in range(count):
        n = rng.randint(1, 2)
        A = random_general_position(rng, n, rng.randint(n + 1, 5))
        c = enumerate_chambers(A)
        eta = [Fraction(rng.randint(1, 8), 4) for _ in range(len(A))]
        pts = morse_critical_points(A, eta, c)
        if len(pts) != c.n_bounded:
            return False, "count"
        for p, cid in pts:
            ch = c.chambers[cid]
            if sign_vector_of(A, p) != ch.sign:
                return False, "not interior"
            gnorm = math.sqrt(sum(float(g) ** 2 for g in morse_gradient(A, eta, p)))
            if gnorm >= 1e-12:
                return False, "gradient %.2e" % gnorm
    dt = time.perf_counter() - t
    return dt < 10, "%d instances, %.1fs" % (count, dt)


def euler_sweep_points(count=10, seed=6):
    rng = random.Random(seed)
    pts = []
    while len(pts) < count:
        a = Fraction(rng.randint(-6, 6), 4)
        ga = Fraction(rng.randint(-6, 6), 4)
        if a.denominator == 1 or ga.denominator == 1 or (a + ga).denominator == 1 and a + ga <= 0:
            continue
        b = Fraction(rng.randint(-6, 6), 4)
        x = Fraction(rng.randint(-8, 8), 16)
        pts.append(HgParams(a, b, a + ga, x))
    return pts


def check_euler():
    t = time.perf_counter()
    worst = verify_euler_integral(HgParams(Fraction(1, 2), Fraction(1, 3), Fraction(3, 2), Fraction(1, 4)))["residual"]
    neg = verify_euler_integral(HgParams(Fraction(-1, 2), Fraction(1, 3), Fraction(3, 2), Fraction(1, 4)))["residual"]
    for p in euler_sweep_points():
        worst = max(worst, verify_euler_integral(p)["residual"])
    dt = time.perf_counter() - t
    return worst < 1e-8 and neg < 1e-8 and dt < 20, "max residual %.1e, negative case %.1e, %.1fs" % (worst, neg, dt)


def check_kummer():
    r = verify_kummer_integral(Fraction(1, 2), Fraction(3, 2), 1)
    return r["residual"] < 1e-8 and abs(r["det"]) > 1e-10, "residual %.1e, |det| %.3f" % (r["residual"], abs(r["det"]))


def check_ode():
    g = (Fraction(1, 2), Fraction(1, 3), Fraction(3, 2))
    k = (Fraction(1, 2), Fraction(3, 2))
    res = [
        ode_residual("gauss", g, Fraction(1, 4), Fraction(1, 1000)),
        ode_residual("kummer", k, 1, Fraction(1, 1000)),
        ode_residual("kummer_unbounded", k, 1, Fraction(1, 1000)),
    ]
    r1 = ode_residual("gauss", g, Fraction(1, 4), Fraction(1, 20))
    r2 = ode_residual("gauss", g, Fraction(1, 4), Fraction(1, 40))
    order = math.log2(r1 / r2)
    return max(res) < 1e-6 and order > 3.5, "residuals %s, observed order %.2f" % (
        ", ".join("%.1e" % r for r in res), order)


def check_monodromy():
    A = Arrangement.from_rows([(0, 1), (1, -1)])
    ch = next(c for c in enumerate_chambers(A).chambers if c.bounded)
    worst = 0.0
    for a in (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)):
        E = ExponentData.scalar([a, Fraction(1, 5)])
        I = TwistedIntegrand.from_exponents(A, E)
        for _, cell in regularize_bounded(ch, A, E, start_angle=0.4).terms:
            if cell.factors[0].kind == LOOP and cell.factors[0].wall == 0:
                worst = max(worst, abs(I.monodromy_check(cell) - cmath.exp(2j * math.pi * float(a))))
    return worst < 1e-12, "max deviation %.1e" % worst


def check_regularization_robustness(tol=1e-10):
    from .quadrature import integrate_chain

    cases = [
        (Arrangement.from_rows([(0, 1), (1, -1)]), [Fraction(-1, 2), Fraction(1, 3)], (-1, -1)),
        (Arrangement.from_rows([(0, 1, 0), (0, 0, 1), (1, -1, -1)]),
         [Fraction(-1, 2), Fraction(1, 3), Fraction(5, 4)], (-1, -1, -1)),
    ]
    worst = 0.0
    for A, al, pw in cases:
        E = ExponentData.scalar(al)
        ch = next(c for c in enumerate_chambers(A).chambers if c.bounded)
        I = TwistedIntegrand.from_exponents(A, E, form=((1.0, pw),))
        base = regularize_bounded(ch, A, E)
        v0 = integrate_chain(I, base, tol).value
        for eps, ang in ((base.epsilon / 2, 0.0), (base.epsilon, 0.9)):
            v = integrate_chain(I, regularize_bounded(ch, A, E, eps=eps, start_angle=ang), tol).value
            worst = max(worst, abs(v - v0) / abs(v0))
    return worst < 10 * tol, "max relative change %.1e" % worst


def check_confluence():
    r = confluence_check(Fraction(1, 2), Fraction(3, 2), 1, [Fraction(1, 16), Fraction(1, 64), Fraction(1, 256)])
    return r["decreasing"], "gaps %s" % ", ".join("%.2e" % g for g in r["gaps"])


KUMMER_JOB = {
    "dim": 1,
    "hyperplanes": [[0, 1], [1, -1]],
    "exponents": ["1/2", "1/3"],
    "phase": {"kind": "linear", "f": [0, 1], "R": "auto"},
    "form": [{"coeff": 1, "powers": [-1, -1]}],
    "tasks": ["chambers", "basis", "periods", "verify"],
}


def check_cli():
    from .cli import run

    with tempfile.TemporaryDirectory() as d:
        job = os.path.join(d, "kummer.json")
        with open(job, "w") as fh:
            json.dump(KUMMER_JOB, fh)
        sink = open(os.devnull, "w")
        code = run(job, d, stream=sink)
        with open(os.path.join(d, "report.json")) as fh:
            rep = json.load(fh)
        bad = dict(KUMMER_JOB, exponents=["1", "1/3"])
        with open(job, "w") as fh:
            json.dump(bad, fh)
        code_bad = run(job, d, stream=sink)
        sink.close()
        with open(os.path.join(d, "report.json")) as fh:
            rep_bad = json.load(fh)
    ok = (code == 0 and rep["basis"]["rank"] == 2 and len(rep["periods"]) == 2
          and code_bad == 3 and rep_bad["reason"] == "genericity: integer eigenvalue at j=1")
    return ok, "exit codes %d/%d, reason %r" % (code, code_bad, rep_bad.get("reason"))


CHECKS = [
    ("1 chamber oracle", check_chamber_oracle),
    ("2 general-position counts", check_general_position_counts),
    ("3 Schlafli count", check_schlafli),
    ("4 rank identities", check_rank_identities),
    ("5 Morse count", check_morse),
    ("6 Euler integral", check_euler),
    ("7 Kummer integral", check_kummer),
    ("8 ODE systems", check_ode),
    ("9 monodromy", check_monodromy),
    ("10 regularization robustness", check_regularization_robustness),
    ("11 confluence", check_confluence),
    ("12 CLI end-to-end", check_cli),
]


def run_suite():
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crashed battery
            ok, detail = False, "%s: %s" % (type(exc).__name__, exc)
        out.append((name, bool(ok), detail))
    return out
