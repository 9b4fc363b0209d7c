"""Regularised twisted cycles for bounded and truncated chambers (rank 1).

A chamber is cut into an inner piece, strips along its walls and corners at
its vertices.  In local coordinates where a wall is ``u = 0`` the strip and
corner integrals over ``0 <= u <= eps`` are replaced by ``1/d`` times a loop
``|u| = eps``, which is exact for ``u^e * (analytic)`` whenever
``d = exp(2 pi i e) - 1 != 0``.  Every cell is stored with its chart so the
orientation follows from the sign of the real Jacobian, with no separate
sign bookkeeping.

Walls whose exponent is an integer carry trivial monodromy; they are left as
plain boundaries (no strip, no loop), like the truncation wall ``Re f = R``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .chambers import Chamber
from .connection import ExponentData, monodromy_factor
from .geometry import (
    Arrangement,
    Hyperplane,
    is_boolean_through_origin,
    rank,
    recession_direction,
    solve_square,
)
from .rdbasis import LINEAR, NONE, PhaseSpec


class RegularizationError(ValueError):
    pass


SEGMENT = "segment"
LOOP = "loop"
ARC = "arc"


@dataclass(frozen=True)
class Cell1:
    """One factor of a product cell.

    ``segment``: real parameter from ``start`` to ``end``.
    ``loop``: ``u = radius * exp(i theta)`` for theta in
    ``[start_angle, start_angle + 2 pi]``, anchored at theta = 0.
    ``arc``: the same circle from ``start_angle`` back to angle 0.
    ``wall`` names the hyperplane a loop goes around.
    """

    kind: str
    start: float = 0.0
    end: float = 1.0
    radius: float = 0.0
    start_angle: float = 0.0
    wall: int | None = None

    def anchor(self) -> float:
        # the segment midpoint stays off walls even when an end lies on a plain wall
        return 0.5 * (self.start + self.end) if self.kind == SEGMENT else 0.0

    def coord(self, param):
        if self.kind == SEGMENT:
            return np.asarray(param, dtype=complex)
        return self.radius * np.exp(1j * np.asarray(param, dtype=float))

    def nodes(self, m: int):
        """Parameter nodes in traversal order and complex weights for ``du``."""
        if self.kind == SEGMENT:
            x, w = np.polynomial.legendre.leggauss(m)
            half = 0.5 * (self.end - self.start)
            return self.start + half * (x + 1), (half * w).astype(complex)
        # the twisted integrand is not periodic around a loop (it picks up the
        # monodromy), so loops use Gauss-Legendre in the angle as well
        x, w = np.polynomial.legendre.leggauss(m)
        a = self.start_angle
        b = a + 2 * math.pi if self.kind == LOOP else 0.0
        half = 0.5 * (b - a)
        th = a + half * (x + 1)
        if half < 0:
            th, w = th[::-1], w[::-1]
        return th, 1j * self.radius * np.exp(1j * th) * half * w

    def path_prefix(self):
        """Parameters visited between the anchor and the first node."""
        if self.kind == SEGMENT:
            return [self.anchor()]
        return [0.0, self.start_angle]


class AffineChart:
    """``t = origin + sum_k u_k v_k``."""

    def __init__(self, origin, vectors):
        self.origin = np.asarray(origin, dtype=float)
        self.vectors = np.asarray(vectors, dtype=float).reshape(len(vectors), -1)
        self._det = float(np.linalg.det(self.vectors.T)) if len(vectors) else 1.0

    def point(self, u):
        t = self.origin.astype(complex).reshape((-1,) + (1,) * np.ndim(u[0]))
        t = np.broadcast_to(t, (len(self.origin),) + np.broadcast(*u).shape).copy()
        for uk, vk in zip(u, self.vectors):
            t = t + vk.reshape((-1,) + (1,) * np.ndim(uk)) * uk
        return t

    def jacobian(self, u):
        return np.full(np.broadcast(*u).shape, self._det, dtype=complex)


class RuledChart:
    """Strip chart ``t = (1 - lam) P(w) + lam Q(w)`` with ``P``, ``Q`` affine in ``w``."""

    def __init__(self, P0, P1, Q0, Q1):
        self.P0, self.P1, self.Q0, self.Q1 = (np.asarray(v, dtype=float) for v in (P0, P1, Q0, Q1))

    def point(self, u):
        lam, w = np.broadcast_arrays(*u)
        sh = (-1,) + (1,) * lam.ndim
        P = self.P0.reshape(sh) + self.P1.reshape(sh) * w
        Q = self.Q0.reshape(sh) + self.Q1.reshape(sh) * w
        return (1 - lam) * P + lam * Q

    def jacobian(self, u):
        lam, w = np.broadcast_arrays(*u)
        dl = [(self.Q0[k] - self.P0[k]) + (self.Q1[k] - self.P1[k]) * w for k in range(2)]
        dw = [(1 - lam) * self.P1[k] + lam * self.Q1[k] for k in range(2)]
        return dl[0] * dw[1] - dl[1] * dw[0]


class TriangleChart:
    """Collapsed square-to-triangle map ``t = V0 + x (V1 - V0) + x y (V2 - V1)``."""

    def __init__(self, V0, V1, V2):
        self.V0, self.V1, self.V2 = (np.asarray(v, dtype=float) for v in (V0, V1, V2))
        e1, e2 = self.V1 - self.V0, self.V2 - self.V1
        self._det = float(e1[0] * e2[1] - e1[1] * e2[0])

    def point(self, u):
        x, y = np.broadcast_arrays(*u)
        sh = (-1,) + (1,) * x.ndim
        return (self.V0.reshape(sh) + x * (self.V1 - self.V0).reshape(sh)
                + x * y * (self.V2 - self.V1).reshape(sh)).astype(complex)

    def jacobian(self, u):
        x, y = np.broadcast_arrays(*u)
        return (self._det * x).astype(complex)


@dataclass
class ProductCell:
    factors: tuple[Cell1, ...]
    chart: object
    orientation: int
    base_args: tuple[float, ...]
    label: str = ""

    @property
    def basepoint(self):
        return self.chart.point([np.asarray(f.coord(f.anchor())) for f in self.factors])

    def loop_walls(self):
        return [f.wall for f in self.factors if f.kind == LOOP]


@dataclass(frozen=True)
class Ray:
    """Unbounded tail ``start + s * direction``, s >= 0, attached to a truncated cycle."""

    start: tuple[float, ...]
    direction: tuple[float, ...]
    base_args: tuple[float, ...]


@dataclass
class TwistedChain:
    terms: list  # (coefficient, ProductCell)
    epsilon: float
    chamber: Chamber | None = None
    plain_walls: tuple[int, ...] = ()
    rays: list = field(default_factory=list)
    kind: str = "bounded"

    def __len__(self):
        return len(self.terms)


def _base_args(sign_vec):
    return tuple(0.0 if s > 0 else math.pi for s in sign_vec)


def _loop_factor_terms(wall, eps, d, start_angle):
    """Expansion of the regularised factor ``(1/d) S`` for a given loop start angle."""
    out = [(1 / d, Cell1(LOOP, radius=eps, start_angle=start_angle, wall=wall))]
    if start_angle:
        out.append((1.0, Cell1(ARC, radius=eps, start_angle=start_angle, wall=wall)))
    return out


def _regularized_walls(E: ExponentData, walls):
    reg, plain = [], []
    for j in walls:
        (plain if E.alphas[j].is_integer() else reg).append(j)
    return reg, plain


def _check_input(A: Arrangement, E: ExponentData):
    if E.rank != 1:
        raise RegularizationError("regularization is implemented for rank 1 only")
    if len(E) != len(A):
        raise RegularizationError("need one exponent per hyperplane")
    if A.dim not in (1, 2):
        raise RegularizationError("parametrised regularised cycles need n in {1, 2}, got %d" % A.dim)
    if not is_boolean_through_origin(A, coned=True):
        raise RegularizationError("arrangement is not in general position")


# ---------------------------------------------------------------- dimension one


def _interval(A: Arrangement, chamber: Chamber):
    """Endpoints (value, wall) of a chamber on the line; wall None at infinity."""
    lo, hi = (-math.inf, None), (math.inf, None)
    for j, (h, s) in enumerate(zip(A.hyperplanes, chamber.sign)):
        root = -h.const / h.normal[0]
        # s * (a0 + a1 t) > 0 gives a lower bound iff s * a1 > 0
        if s * h.normal[0] > 0:
            if lo[1] is None or root > lo[0]:
                lo = (root, j)
        else:
            if hi[1] is None or root < hi[0]:
                hi = (root, j)
    return lo, hi


def _eps_1d(A: Arrangement, ends):
    roots = sorted({-h.const / h.normal[0] for h in A.hyperplanes})
    pts = [e for e in ends if math.isfinite(e)]
    dmin = math.inf
    for p in pts:
        for r in roots:
            if r != p:
                dmin = min(dmin, abs(float(p) - float(r)))
    if len(pts) == 2:
        dmin = min(dmin, abs(float(pts[1]) - float(pts[0])))
    return dmin / 10 if math.isfinite(dmin) else 0.1


def _chain_1d(A, E, chamber, lo, hi, plain_ends, eps, start_angle, kind):
    """``lo``/``hi`` are (position, wall or None); ``plain_ends`` marks ends without a loop."""
    base = _base_args(chamber.sign)
    reg_lo = lo[1] is not None and "lo" not in plain_ends
    reg_hi = hi[1] is not None and "hi" not in plain_ends
    a = float(lo[0]) + (eps if reg_lo else 0.0)
    b = float(hi[0]) - (eps if reg_hi else 0.0)
    terms = [(1.0, ProductCell((Cell1(SEGMENT, a, b),), AffineChart([0.0], [[1.0]]), 1, base, "sigma"))]
    for end, sgn, is_reg in ((lo, 1.0, reg_lo), (hi, -1.0, reg_hi)):
        if not is_reg:
            continue
        j = end[1]
        d = monodromy_factor(E.alphas[j])
        chart = AffineChart([float(end[0])], [[sgn]])
        for coeff, fac in _loop_factor_terms(j, eps, d, start_angle):
            terms.append((coeff, ProductCell((fac,), chart, int(sgn), base, "loop@%d" % (j + 1))))
    plain = tuple(e[1] for e in (lo, hi) if e[1] is not None and E.alphas[e[1]].is_integer())
    return TwistedChain(terms, eps, chamber, plain, kind=kind)


# ---------------------------------------------------------------- dimension two


def _polygon(A: Arrangement, chamber: Chamber, extra=None):
    """Vertices (CCW) and edge walls of a convex polygonal region.

    ``extra`` is an optional additional half-plane ``(coeffs, "trunc")`` kept
    as ``l >= 0``.
    """
    lines = [(h.coeffs, j, s) for j, (h, s) in enumerate(zip(A.hyperplanes, chamber.sign))]
    if extra is not None:
        lines.append((extra, "trunc", 1))
    verts = {}
    for (c1, j1, _), (c2, j2, _) in itertools.combinations(lines, 2):
        M = [c1[1:], c2[1:]]
        if rank(M) < 2:
            continue
        p = solve_square(M, [-c1[0], -c2[0]])
        if all(s * (c[0] + c[1] * p[0] + c[2] * p[1]) >= 0 for c, _, s in lines):
            verts.setdefault(p, set()).update({j1, j2})
    if len(verts) < 3:
        raise RegularizationError("region is not a bounded polygon")
    pts = list(verts)
    cx = sum(float(p[0]) for p in pts) / len(pts)
    cy = sum(float(p[1]) for p in pts) / len(pts)
    pts.sort(key=lambda p: math.atan2(float(p[1]) - cy, float(p[0]) - cx))
    edges = []
    for k in range(len(pts)):
        common = verts[pts[k]] & verts[pts[(k + 1) % len(pts)]]
        if len(common) != 1:
            raise RegularizationError("chamber is not in general position")
        edges.append(next(iter(common)))
    return pts, edges, lines


def _unit_coordinate(coeffs, s):
    """Affine function ``u = s * l / |a|`` as (const, gradient) floats."""
    a = np.array([float(c) for c in coeffs[1:]])
    nrm = float(np.linalg.norm(a))
    return s * float(coeffs[0]) / nrm, s * a / nrm


def _solve_point(ua, ub, va, vb):
    """Point where coordinate ``ua`` equals ``va`` and ``ub`` equals ``vb``."""
    M = np.array([ua[1], ub[1]])
    return np.linalg.solve(M, np.array([va - ua[0], vb - ub[0]]))


def _chain_2d(A, E, chamber, extra, eps, start_angle, kind):
    pts, edges, lines = _polygon(A, chamber, extra)
    coords = {}
    for c, j, s in lines:
        coords[j] = _unit_coordinate(c, s)
    regular = {j for j in edges if j != "trunc" and not E.alphas[j].is_integer()}
    dvals = {j: monodromy_factor(E.alphas[j]) for j in regular}
    base = _base_args(chamber.sign)
    nv = len(pts)
    # edge k joins vertex k and k+1; vertex k sits between edges k-1 and k
    if eps is None:
        eps = _eps_2d(A, pts, edges, coords, extra)
    off = {j: (eps if j in regular else 0.0) for j in edges}
    inner = []
    for k in range(nv):
        jp, jn = edges[k - 1], edges[k]
        inner.append(_solve_point(coords[jp], coords[jn], off[jp], off[jn]))
    _check_inner(inner, pts)
    terms = []
    centre = np.mean(inner, axis=0)
    for k in range(nv):
        chart = TriangleChart(centre, inner[k], inner[(k + 1) % nv])
        o = 1 if chart._det > 0 else -1
        cell = ProductCell((Cell1(SEGMENT, 0.0, 1.0), Cell1(SEGMENT, 0.0, 1.0)), chart, o, base, "sigma%d" % k)
        terms.append((1.0, cell))
    for k in range(nv):
        j = edges[k]
        if j not in regular:
            continue
        jp, jn = edges[k - 1], edges[(k + 1) % nv]
        # P(w): u_jp = off, u_j = w ; Q(w): u_jn = off, u_j = w
        P0 = _solve_point(coords[jp], coords[j], off[jp], 0.0)
        P1 = _solve_point(coords[jp], coords[j], off[jp], 1.0) - P0
        Q0 = _solve_point(coords[jn], coords[j], off[jn], 0.0)
        Q1 = _solve_point(coords[jn], coords[j], off[jn], 1.0) - Q0
        chart = RuledChart(P0, P1, Q0, Q1)
        jr = chart.jacobian([np.array(0.5), np.array(eps / 2)]).real
        o = 1 if jr > 0 else -1
        for coeff, fac in _loop_factor_terms(j, eps, dvals[j], start_angle):
            cell = ProductCell((Cell1(SEGMENT, 0.0, 1.0), fac), chart, o, base, "strip@%d" % (j + 1))
            terms.append((coeff, cell))
    for k in range(nv):
        i, j = edges[k - 1], edges[k]
        if i not in regular or j not in regular:
            continue
        V = _solve_point(coords[i], coords[j], 0.0, 0.0)
        mi = _solve_point(coords[i], coords[j], 1.0, 0.0) - V
        mj = _solve_point(coords[i], coords[j], 0.0, 1.0) - V
        chart = AffineChart(V, [mi, mj])
        o = 1 if chart._det > 0 else -1
        for (ci, fi), (cj, fj) in itertools.product(
            _loop_factor_terms(i, eps, dvals[i], start_angle), _loop_factor_terms(j, eps, dvals[j], start_angle)
        ):
            cell = ProductCell((fi, fj), chart, o, base, "corner@%d,%d" % (i + 1, j + 1))
            terms.append((ci * cj, cell))
    plain = tuple(sorted(j for j in set(edges) if j != "trunc" and j not in regular))
    return TwistedChain(terms, eps, chamber, plain, kind=kind)


def _eps_2d(A, pts, edges, coords, extra):
    fpts = [np.array([float(x) for x in p]) for p in pts]
    dmin = math.inf
    for p in fpts:
        for h in A.hyperplanes:
            a = np.array([float(c) for c in h.normal])
            dist = abs(float(h.const) + a @ p) / np.linalg.norm(a)
            if dist > 1e-300:
                dmin = min(dmin, dist)
        if extra is not None:
            a = np.array([float(c) for c in extra[1:]])
            dist = abs(float(extra[0]) + a @ p) / np.linalg.norm(a)
            if dist > 1e-300:
                dmin = min(dmin, dist)
    for k in range(len(fpts)):
        dmin = min(dmin, float(np.linalg.norm(fpts[k] - fpts[k - 1])))
    spread = 1.0
    for k in range(len(edges)):
        i, j = edges[k - 1], edges[k]
        V = _solve_point(coords[i], coords[j], 0.0, 0.0)
        mi = _solve_point(coords[i], coords[j], 1.0, 0.0) - V
        mj = _solve_point(coords[i], coords[j], 0.0, 1.0) - V
        spread = max(spread, float(np.linalg.norm(mi) + np.linalg.norm(mj)))
    return dmin / (10 * spread)


def _check_inner(inner, pts):
    n = len(inner)
    area = sum(inner[k][0] * inner[(k + 1) % n][1] - inner[(k + 1) % n][0] * inner[k][1] for k in range(n))
    outer = sum(
        float(pts[k][0]) * float(pts[(k + 1) % n][1]) - float(pts[(k + 1) % n][0]) * float(pts[k][1])
        for k in range(n)
    )
    if area * outer <= 0 or abs(area) < 1e-3 * abs(outer):
        raise RegularizationError("epsilon too large: inner polygon degenerates")


# ---------------------------------------------------------------- public API


def default_epsilon(A: Arrangement, chamber: Chamber, phase: PhaseSpec | None = None) -> float:
    if A.dim == 1:
        lo, hi = _interval(A, chamber)
        return _eps_1d(A, [lo[0], hi[0]])
    extra = _truncation_halfplane(A, phase) if phase is not None and not chamber.bounded else None
    pts, edges, lines = _polygon(A, chamber, extra)
    coords = {j: _unit_coordinate(c, s) for c, j, s in lines}
    return _eps_2d(A, pts, edges, coords, extra)


def regularize_bounded(chamber: Chamber, A: Arrangement, E: ExponentData,
                       eps: float | None = None, start_angle: float = 0.0) -> TwistedChain:
    """Regularised cycle homologous to a bounded chamber."""
    _check_input(A, E)
    if not chamber.bounded:
        raise RegularizationError("chamber %d is unbounded" % chamber.id)
    if A.dim == 1:
        lo, hi = _interval(A, chamber)
        eps = eps if eps is not None else _eps_1d(A, [lo[0], hi[0]])
        plain = {name for name, end in (("lo", lo), ("hi", hi)) if E.alphas[end[1]].is_integer()}
        return _chain_1d(A, E, chamber, lo, hi, plain, eps, start_angle, "bounded")
    return _chain_2d(A, E, chamber, None, eps, start_angle, "bounded")


def _truncation_halfplane(A: Arrangement, phase: PhaseSpec):
    if phase.kind != LINEAR:
        raise RegularizationError("two-dimensional truncation is polygonal only for a linear phase")
    c = phase.f.coeffs
    return tuple([phase.R - c[0]] + [-x for x in c[1:]])


def regularize_truncated(chamber: Chamber, phase: PhaseSpec, A: Arrangement, E: ExponentData,
                         eps: float | None = None, start_angle: float = 0.0) -> TwistedChain:
    """Regularised ``chamber ∩ {Re f < R}``; the truncation facet carries no loop.

    For n = 1 the chain also records the ray beyond the truncation point so
    that integration can include the rapidly decaying tail.
    """
    _check_input(A, E)
    if phase.kind == NONE or phase.R is None:
        raise RegularizationError("truncation needs a phase with an explicit threshold R")
    if chamber.bounded:
        raise RegularizationError("chamber %d is bounded; use regularize_bounded" % chamber.id)
    if A.dim == 1:
        lo, hi = _interval(A, chamber)
        if phase.kind == LINEAR:
            c0, c1 = phase.f.coeffs
            cut = (phase.R - c0) / c1
            if c1 > 0 and lo[1] is not None and hi[1] is None:
                hi = (cut, None)
                direction = 1.0
            elif c1 < 0 and hi[1] is not None and lo[1] is None:
                lo = (cut, None)
                direction = -1.0
            else:
                raise RegularizationError(
                    "chamber %d is not a rapid-decay cycle for this phase (Re f does not grow to +inf along it)"
                    % chamber.id
                )
        else:
            root = math.sqrt(float(phase.R))
            if hi[1] is None:
                hi, direction = (root, None), 1.0
            else:
                lo, direction = (-root, None), -1.0
        if not float(lo[0]) < float(hi[0]):
            raise RegularizationError("R is too small: truncation misses chamber %d" % chamber.id)
        eps = eps if eps is not None else _eps_1d(A, [lo[0], hi[0]])
        plain = {name for name, end in (("lo", lo), ("hi", hi)) if end[1] is None or E.alphas[end[1]].is_integer()}
        chain = _chain_1d(A, E, chamber, lo, hi, plain, eps, start_angle, "truncated")
        start = float(hi[0]) if direction > 0 else float(lo[0])
        chain.rays.append(Ray((start,), (direction,), _base_args(chamber.sign)))
        return chain
    extra = _truncation_halfplane(A, phase)
    trunc = Hyperplane(extra)
    aug = Arrangement(2, A.hyperplanes + (trunc,))
    if recession_direction(aug, chamber.sign + (1,)) is not None:
        raise RegularizationError("chamber %d stays unbounded after truncation" % chamber.id)
    return _chain_2d(A, E, chamber, extra, eps, start_angle, "truncated")


def coefficient_check(chain: TwistedChain, E: ExponentData) -> bool:
    """Each coefficient times the product of its loop walls' d_j is 1 (loops) or the arc sign."""
    for coeff, cell in chain.terms:
        prod = coeff
        for j in cell.loop_walls():
            prod *= monodromy_factor(E.alphas[j])
        if abs(prod - 1) > 1e-12:
            return False
    return True
