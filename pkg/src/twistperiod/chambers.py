"""Chamber enumeration, boundedness, closed-form counts and Morse critical points."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .geometry import (
    Arrangement,
    GeometryError,
    eval_hyperplane,
    is_boolean_through_origin,
    recession_direction,
    sign,
    sign_vector_feasible,
    solve_square,
)


@dataclass(frozen=True)
class Chamber:
    sign: tuple[int, ...]
    witness: tuple[Fraction, ...]
    bounded: bool
    id: int

    def sign_string(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.sign)


@dataclass(frozen=True)
class ChamberCensus:
    chambers: tuple[Chamber, ...]

    @property
    def n_total(self) -> int:
        return len(self.chambers)

    @property
    def n_bounded(self) -> int:
        return sum(c.bounded for c in self.chambers)

    @property
    def n_unbounded(self) -> int:
        return self.n_total - self.n_bounded

    def by_sign(self, s) -> Chamber | None:
        s = tuple(s)
        return next((c for c in self.chambers if c.sign == s), None)


def _finalise(A: Arrangement, cells: dict) -> ChamberCensus:
    out = []
    for rank_, s in enumerate(sorted(cells)):
        bounded = recession_direction(A, s) is None
        out.append(Chamber(s, tuple(cells[s]), bounded, rank_))
    return ChamberCensus(tuple(out))


def enumerate_chambers(A: Arrangement) -> ChamberCensus:
    """All chambers by incremental insertion of the hyperplanes in input order.

    A chamber of the first ``k`` hyperplanes splits when hyperplane ``k+1``
    takes both signs on it.  The parent witness already decides one side, so
    only the opposite side needs an exact LP.
    """
    cells = {(): tuple(Fraction(0) for _ in range(A.dim))}
    for k, h in enumerate(A.hyperplanes):
        sub = Arrangement(A.dim, A.hyperplanes[: k + 1])
        nxt = {}
        for s, p in cells.items():
            v = sign(eval_hyperplane(h, p))
            for side in (1, -1):
                if side == v:
                    nxt[s + (side,)] = p
                    continue
                q = sign_vector_feasible(sub, s + (side,))
                if q is not None:
                    nxt[s + (side,)] = q
        cells = nxt
    return _finalise(A, cells)


def brute_force_chambers(A: Arrangement) -> ChamberCensus:
    """Reference census: test every one of the 2^N sign vectors."""
    cells = {}
    for s in itertools.product((-1, 1), repeat=len(A)):
        p = sign_vector_feasible(A, s)
        if p is not None:
            cells[s] = p
    return _finalise(A, cells)


def bounded_chambers(A: Arrangement, census: ChamberCensus | None = None) -> list[Chamber]:
    census = census or enumerate_chambers(A)
    return [c for c in census.chambers if c.bounded]


def schlafli_bounded_count(N: int, n: int) -> int:
    """Bounded chambers of the real hypersphere arrangement cut out by N hyperplanes."""
    if N < 1 or n < 1:
        raise ValueError("need N >= 1 and n >= 1")
    return comb(N - 1, n - 1) + sum(comb(N, n - i) for i in range(1, n + 1))


def general_position_counts(N: int, n: int) -> tuple[int, int]:
    """(total, bounded) chamber counts for N affine hyperplanes in general position."""
    return sum(comb(N, i) for i in range(n + 1)), comb(N - 1, n)


def unbounded_equals_schlafli_check(A: Arrangement, census: ChamberCensus | None = None) -> bool:
    if not is_boolean_through_origin(A, coned=True):
        raise GeometryError("arrangement is not in general position (coned Boolean test fails)")
    census = census or enumerate_chambers(A)
    return census.n_unbounded == schlafli_bounded_count(len(A), A.dim)


# ---------------------------------------------------------------- Morse theory


class NewtonDidNotConverge(RuntimeError):
    pass


def _log_potential_parts(normals, consts, eta, x):
    vals = consts + normals @ x
    w = eta / vals
    grad = normals.T @ w
    hess = -(normals.T * (eta / vals**2)) @ normals
    return vals, grad, hess


def morse_gradient(A: Arrangement, eta, p):
    """Exact gradient of ``sum_j eta_j log|l_j|`` at a rational point."""
    eta = [Fraction(e) for e in eta]
    g = [Fraction(0)] * A.dim
    for e, h in zip(eta, A.hyperplanes):
        w = e / eval_hyperplane(h, p)
        g = [gi + w * a for gi, a in zip(g, h.normal)]
    return tuple(g)


def _exact_newton(A, eta, p, grid=2**-96):
    """One Newton step in rational arithmetic, rounded to a dyadic grid."""
    eta = [Fraction(e) for e in eta]
    n = A.dim
    g = morse_gradient(A, eta, p)
    H = [[Fraction(0)] * n for _ in range(n)]
    for e, h in zip(eta, A.hyperplanes):
        w = e / eval_hyperplane(h, p) ** 2
        for i in range(n):
            for k in range(n):
                H[i][k] -= w * h.normal[i] * h.normal[k]
    step = solve_square(H, [-x for x in g])
    scale = Fraction(grid)
    return tuple(round((x + d) / scale) * scale for x, d in zip(p, step))


def morse_critical_point(A: Arrangement, chamber: Chamber, eta, tol=1e-12, max_iter=200):
    """Critical point of ``sum_j eta_j log|l_j|`` inside a bounded chamber.

    The function is strictly concave on the chamber, so damped Newton from
    the witness converges to its unique maximum; steps that would leave the
    chamber are halved.  Double precision cannot push the gradient below
    about ``1e-16 * sum_j |eta_j a_j / l_j|``, so a few Newton steps in
    rational arithmetic finish the job.  The point is returned as a tuple of
    fractions whose exact gradient has norm below ``tol``.
    """
    normals = np.array([[float(a) for a in h.normal] for h in A.hyperplanes])
    consts = np.array([float(h.const) for h in A.hyperplanes])
    eta_f = np.asarray([float(e) for e in eta], dtype=float)
    s = np.array(chamber.sign, dtype=float)
    x = np.array([float(v) for v in chamber.witness])

    def objective(y):
        return float(eta_f @ np.log(np.abs(consts + normals @ y)))

    for _ in range(max_iter):
        vals, grad, hess = _log_potential_parts(normals, consts, eta_f, x)
        floor = 1e-13 * float(np.abs(eta_f / vals) @ np.abs(normals).sum(axis=1))
        if np.linalg.norm(grad) < max(tol, floor):
            break
        step = np.linalg.solve(hess, -grad)
        lam = 1.0
        f0 = objective(x)
        while True:
            y = x + lam * step
            inside = np.all(s * (consts + normals @ y) > 0)
            if inside and objective(y) >= f0 - 1e-15 * abs(f0):
                break
            lam *= 0.5
            if lam < 1e-30:
                raise NewtonDidNotConverge("line search failed in chamber %d" % chamber.id)
        x = y
    else:
        raise NewtonDidNotConverge("no convergence after %d iterations in chamber %d" % (max_iter, chamber.id))
    p = tuple(Fraction(v) for v in x)
    for _ in range(6):
        gnorm = float(np.linalg.norm([float(g) for g in morse_gradient(A, eta, p)]))
        if gnorm < tol:
            break
        p = _exact_newton(A, eta, p)
    else:
        gnorm = float(np.linalg.norm([float(g) for g in morse_gradient(A, eta, p)]))
    if gnorm >= tol or tuple(sign(eval_hyperplane(h, p)) for h in A.hyperplanes) != chamber.sign:
        raise NewtonDidNotConverge("gradient norm %.3e in chamber %d" % (gnorm, chamber.id))
    return p


def morse_critical_points(A: Arrangement, eta, census: ChamberCensus | None = None):
    """One critical point per bounded chamber, as ``(point, chamber id)`` pairs."""
    eta = list(eta)
    if len(eta) != len(A) or any(e <= 0 for e in eta):
        raise ValueError("eta must be a positive vector of length N")
    chambers = bounded_chambers(A, census)
    if not chambers:
        raise GeometryError("arrangement has no bounded chamber")
    return [(morse_critical_point(A, c, eta), c.id) for c in chambers]
