"""Exact two-phase simplex over rationals.

Every pivot is done in :class:`fractions.Fraction` arithmetic and the
entering/leaving variables are chosen by Bland's rule, so the method
terminates on degenerate problems and gives bit-identical answers on every
platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def _pivot(T, basis, row, col):
    piv = T[row][col]
    prow = T[row]
    if piv != 1:
        prow = [v / piv for v in prow]
        T[row] = prow
    nz = [k for k, v in enumerate(prow) if v]
    for i, r in enumerate(T):
        if i == row:
            continue
        f = r[col]
        if f:
            for k in nz:
                r[k] -= f * prow[k]
    basis[row] = col


def _run_simplex(T, basis, ncols):
    """Maximise the objective stored in the last row of ``T`` (as -c)."""
    obj = T[-1]
    m = len(T) - 1
    while True:
        col = next((k for k in range(ncols) if obj[k] < 0), None)
        if col is None:
            return OPTIMAL
        best = None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        _pivot(T, basis, best[1], col)
        obj = T[-1]


def solve_lp(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximise ``c.x`` subject to ``A x <= b`` and ``x >= 0``.

    Inputs may be ints or Fractions; the answer is exact.
    """
    m, n = len(A), len(c)
    c = [Fraction(v) for v in c]
    rows = []
    negative = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        if len(row) != n:
            raise ValueError("constraint row %d has length %d, expected %d" % (i, len(row), n))
        rows.append((row, Fraction(b[i])))
        if b[i] < 0:
            negative.append(i)
    n_art = len(negative)
    ncols = n + m + n_art
    T = []
    basis = []
    art_of = {}
    for i, (row, bi) in enumerate(rows):
        line = [Fraction(0)] * (ncols + 1)
        sgn = -1 if bi < 0 else 1
        for k in range(n):
            line[k] = sgn * row[k]
        line[n + i] = Fraction(sgn)
        line[-1] = sgn * bi
        if bi < 0:
            a = n + m + len(art_of)
            art_of[i] = a
            line[a] = Fraction(1)
            basis.append(a)
        else:
            basis.append(n + i)
        T.append(line)

    if n_art:
        # phase 1: maximise -(sum of artificials)
        obj = [Fraction(0)] * (ncols + 1)
        for a in art_of.values():
            obj[a] = Fraction(1)
        for i in art_of:
            obj = [o - v for o, v in zip(obj, T[i])]
        T.append(obj)
        _run_simplex(T, basis, ncols)
        if T[-1][-1] != 0:
            return LPResult(INFEASIBLE)
        T.pop()
        arts = set(art_of.values())
        # drive remaining artificials out of the basis
        for i in range(m):
            if basis[i] in arts:
                col = next((k for k in range(n + m) if T[i][k] != 0), None)
                if col is not None:
                    _pivot(T, basis, i, col)
        keep = [k for k in range(ncols) if k not in arts]
        T = [[r[k] for k in keep] + [r[-1]] for r in T]
        remap = {old: new for new, old in enumerate(keep)}
        live = [i for i in range(m) if basis[i] in remap]
        T = [T[i] for i in live]
        basis = [remap[basis[i]] for i in live]
        ncols = n + m

    obj = [Fraction(0)] * (ncols + 1)
    for k in range(n):
        obj[k] = -c[k]
    for i, bv in enumerate(basis):
        f = obj[bv]
        if f:
            obj = [o - f * v for o, v in zip(obj, T[i])]
    T.append(obj)
    status = _run_simplex(T, basis, ncols)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    return LPResult(OPTIMAL, tuple(x), T[-1][-1])


def solve_lp_free(c, A, b, free: Sequence[bool]) -> LPResult:
    """Like :func:`solve_lp` but variables flagged in ``free`` are unrestricted in sign."""
    cols = []
    for k, fr in enumerate(free):
        cols.append((k, 1))
        if fr:
            cols.append((k, -1))
    c2 = [s * c[k] for k, s in cols]
    A2 = [[s * row[k] for k, s in cols] for row in A]
    res = solve_lp(c2, A2, b)
    if res.status != OPTIMAL:
        return res
    x = [Fraction(0)] * len(free)
    for (k, s), v in zip(cols, res.x):
        x[k] += s * v
    return LPResult(OPTIMAL, tuple(x), res.value)
