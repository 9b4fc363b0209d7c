"""Tensor-product quadrature of twisted integrands over regularised chains.

Segments use Gauss-Legendre, full loops the periodic trapezoid rule.  The
multivalued factor ``prod l_j^alpha_j`` is never taken on the principal
branch: each ``arg l_j`` is carried continuously from the cell anchor along
the parametrisation, refining any step whose argument change reaches pi/2.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .connection import ComplexRational, ExponentData
from .geometry import Arrangement
from .rdbasis import LINEAR, QUADRATIC, PhaseSpec
from .regularization import LOOP, SEGMENT, ProductCell, Ray, TwistedChain


class QuadratureError(RuntimeError):
    pass


class TransportUnderflow(QuadratureError):
    pass


class NonConvergence(QuadratureError):
    def __init__(self, message, deltas=()):
        super().__init__(message)
        self.deltas = list(deltas)


class NonDecayingDirection(QuadratureError):
    pass


@dataclass
class TwistedIntegrand:
    """``prod_j l_j^alpha_j * exp(-f) * sum_k c_k prod_j l_j^m_kj dt``."""

    arrangement: Arrangement
    alphas: tuple
    phase: PhaseSpec = field(default_factory=PhaseSpec)
    form: tuple = ((1.0, None),)  # (coefficient, powers or None for all-zero)

    def __post_init__(self):
        A = self.arrangement
        self.alphas = np.array([complex(ComplexRational.parse(a)) if not isinstance(a, complex) else a
                                for a in self.alphas], dtype=complex)
        if len(self.alphas) != len(A):
            raise ValueError("need one exponent per hyperplane")
        self.consts = np.array([float(h.const) for h in A.hyperplanes])
        self.normals = np.array([[float(a) for a in h.normal] for h in A.hyperplanes]).reshape(len(A), A.dim)
        form = []
        for c, powers in self.form:
            powers = tuple(int(m) for m in powers) if powers is not None else (0,) * len(A)
            if len(powers) != len(A):
                raise ValueError("form term needs one power per hyperplane")
            form.append((complex(c), powers))
        self.form = tuple(form)

    @classmethod
    def from_exponents(cls, A: Arrangement, E: ExponentData, phase=None, form=((1.0, None),)):
        return cls(A, tuple(complex(a) for a in E.alphas), phase or PhaseSpec(), form)

    def scaled_form(self, s: complex) -> "TwistedIntegrand":
        return TwistedIntegrand(self.arrangement, tuple(self.alphas), self.phase,
                                tuple((c * s, p) for c, p in self.form))

    @property
    def dim(self):
        return self.arrangement.dim

    def linear_values(self, t):
        """``l_j(t)`` for points ``t`` of shape (n, ...), result (N, ...)."""
        sh = (-1,) + (1,) * (t.ndim - 1)
        return self.consts.reshape(sh) + np.tensordot(self.normals, t, axes=(1, 0))

    def phase_values(self, t):
        ph = self.phase
        if ph.kind == LINEAR:
            c = np.array([float(x) for x in ph.f.coeffs])
            return c[0] + np.tensordot(c[1:], t, axes=(0, 0))
        if ph.kind == QUADRATIC:
            return np.sum(t * t, axis=0)
        return np.zeros(t.shape[1:], dtype=complex)

    def evaluate(self, t, logs):
        """Integrand at points ``t`` given continuous logarithms ``logs`` of every ``l_j``."""
        L = self.linear_values(t)
        twist = np.exp(np.tensordot(self.alphas, logs, axes=(0, 0)) - self.phase_values(t))
        form = np.zeros(t.shape[1:], dtype=complex)
        for c, powers in self.form:
            if c == 0:
                continue
            term = np.full(t.shape[1:], c, dtype=complex)
            for j, m in enumerate(powers):
                if m:
                    term = term * L[j] ** m
            form = form + term
        return twist * form

    def monodromy_check(self, cell: ProductCell, m: int = 64):
        """Ratio of the transported integrand after one full loop to its start value."""
        return _loop_ratio(self, cell, m)


# ---------------------------------------------------------------- argument transport


def _transport(values_at, params, base_logs, max_depth=40, max_step=None):
    """Continuous logarithms along a parameter path.

    ``values_at(p)`` returns ``l_j`` values of shape (N, batch..., len(p)).
    ``params`` is the path (first entry is the anchor); ``base_logs`` has
    shape (N, batch...).  Returns logs of shape (N, batch..., len(params)).
    """
    path = np.asarray(params, dtype=float)
    if max_step is not None and len(path) > 1:
        # a full turn returns to the same value, so angle steps are capped too
        pieces, keep, pos = [path[:1]], [0], 0
        for x0, x1 in zip(path[:-1], path[1:]):
            k = max(1, int(math.ceil(abs(x1 - x0) / max_step)))
            pieces.append(np.linspace(x0, x1, k + 1)[1:])
            pos += k
            keep.append(pos)
        dense = np.concatenate(pieces)
        return _transport(values_at, dense, base_logs, max_depth)[..., keep]
    keep = np.arange(len(path))
    vals = values_at(path)
    for _ in range(max_depth):
        if np.any(vals == 0):
            raise TransportUnderflow("path meets a hyperplane")
        step = np.angle(vals[..., 1:] / vals[..., :-1])
        bad = np.any(np.abs(step) >= math.pi / 2, axis=tuple(range(step.ndim - 1)))
        if not bad.any():
            break
        idx = np.nonzero(bad)[0]
        mids = 0.5 * (path[idx] + path[idx + 1])
        path = np.insert(path, idx + 1, mids)
        keep = keep + np.searchsorted(idx, keep, side="left")
        # recompute positions of original points after insertion
        vals = values_at(path)
    else:
        raise TransportUnderflow("argument transport step underflow (cell too close to a hyperplane)")
    args = np.concatenate([np.zeros(step.shape[:-1] + (1,)), np.cumsum(step, axis=-1)], axis=-1)
    logs = np.log(np.abs(vals)) + 1j * (args + base_logs.imag[..., None])
    return logs[..., keep]


def _cell_logs(I: TwistedIntegrand, cell: ProductCell, axes_params):
    """Continuous logs of every l_j on the tensor grid of node parameters.

    ``axes_params`` are the node parameters per factor.  Transport runs along
    factor 0 from its anchor, then along factor 1 from its anchor for each
    factor-0 node, and so on.
    """
    facs = cell.factors
    n = len(facs)
    base = np.array(cell.base_args)
    anchors = [np.asarray(f.coord(f.anchor()), dtype=complex) for f in facs]
    anchor_pt = cell.chart.point(anchors)
    L0 = I.linear_values(anchor_pt.reshape(-1))
    logs = np.log(np.abs(L0)) + 1j * base  # shape (N,)
    fixed = []  # coordinates of already-transported axes, each of full grid shape
    grid_shape = ()
    for k, fac in enumerate(facs):
        nodes = np.asarray(axes_params[k])
        path = np.concatenate([fac.path_prefix(), nodes])
        n_prefix = len(fac.path_prefix())

        def values_at(p, k=k, fac=fac):
            coords = []
            for a in range(n):
                if a < k:
                    coords.append(fixed[a][..., None])
                elif a == k:
                    coords.append(np.asarray(fac.coord(p)).reshape((1,) * len(grid_shape) + (-1,)))
                else:
                    coords.append(anchors[a].reshape((1,) * (len(grid_shape) + 1)))
            coords = np.broadcast_arrays(*coords)
            t = cell.chart.point(coords)
            return I.linear_values(t)

        new = _transport(values_at, path, logs, max_step=None if fac.kind == SEGMENT else math.pi / 8)
        logs = new[..., n_prefix:]
        grid_shape = grid_shape + (len(nodes),)
        coord_k = np.asarray(fac.coord(nodes))
        fixed = [np.broadcast_to(f[..., None], grid_shape) for f in fixed]
        fixed.append(np.broadcast_to(coord_k.reshape((1,) * (len(grid_shape) - 1) + (-1,)), grid_shape))
    return logs


def integrate_cell(I: TwistedIntegrand, cell: ProductCell, m: int) -> complex:
    """Orientation-signed integral of the integrand over one product cell with m nodes per factor."""
    params, weights = zip(*(f.nodes(m) for f in cell.factors))
    logs = _cell_logs(I, cell, params)
    n = len(cell.factors)
    coords = []
    for k, f in enumerate(cell.factors):
        shape = [1] * n
        shape[k] = -1
        coords.append(np.asarray(f.coord(params[k])).reshape(shape))
    coords = np.broadcast_arrays(*coords)
    t = cell.chart.point(coords)
    vals = I.evaluate(t, logs) * cell.chart.jacobian(coords)
    for k in range(n - 1, -1, -1):
        vals = np.tensordot(vals, weights[k], axes=([k], [0]))
    return cell.orientation * complex(vals)


def _loop_ratio(I: TwistedIntegrand, cell: ProductCell, m: int):
    k = next(i for i, f in enumerate(cell.factors) if f.kind == LOOP)
    fac = cell.factors[k]
    params = []
    for i, f in enumerate(cell.factors):
        if i == k:
            params.append(np.array([fac.start_angle, fac.start_angle + 2 * math.pi]))
        else:
            params.append(np.array([f.anchor()]))
    logs = _cell_logs(I, cell, params)
    total = np.tensordot(I.alphas, logs, axes=(0, 0)).reshape(-1)
    return complex(np.exp(total[1] - total[0]))


# ---------------------------------------------------------------- chains


@dataclass
class PeriodReport:
    value: complex
    abs_error_estimate: float
    cells_evaluated: int
    nodes_used: int
    per_cell: list = field(default_factory=list)


def _threads():
    try:
        return max(1, int(os.environ.get("TWISTPERIOD_THREADS", "1")))
    except ValueError:
        return 1


def _converge_cell(I, cell, target, scale, m0, m_max):
    m = m0
    prev = integrate_cell(I, cell, m)
    nodes = m ** len(cell.factors)
    while True:
        m2 = 2 * m
        if m2 > m_max:
            return prev, math.inf, nodes
        cur = integrate_cell(I, cell, m2)
        nodes += m2 ** len(cell.factors)
        delta = abs(cur - prev)
        if delta <= target * max(abs(cur), scale):
            return cur, delta, nodes
        prev, m = cur, m2


def _fsum_complex(values):
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _check_plain_walls(I: TwistedIntegrand, chain: TwistedChain):
    for j in chain.plain_walls:
        alpha = I.alphas[j]
        for c, powers in I.form:
            if c and (alpha.real + powers[j] < 0):
                raise QuadratureError(
                    "integrand has a pole on wall %d, which carries no regularising loop" % (j + 1)
                )


def max_nodes_for(dim: int) -> int:
    return 2 ** 13 if dim <= 1 else 2 ** 9


def integrate_chain(I: TwistedIntegrand, chain: TwistedChain, target_rel_err: float = 1e-12,
                    m0: int = 16, include_tails: bool = True) -> PeriodReport:
    """Sum of coefficient-weighted cell integrals, each refined by node doubling."""
    _check_plain_walls(I, chain)
    m_max = max_nodes_for(I.dim)
    # a coarse pass fixes the absolute scale used for near-zero cells
    coarse = [abs(c * integrate_cell(I, cell, m0)) for c, cell in chain.terms]
    scale = max(coarse, default=0.0)

    def work(term):
        c, cell = term
        value, delta, nodes = _converge_cell(I, cell, target_rel_err, scale / max(abs(c), 1e-300), m0, m_max)
        return c * value, abs(c) * delta, nodes

    if _threads() > 1 and len(chain.terms) > 1:
        with ThreadPoolExecutor(_threads()) as ex:
            results = list(ex.map(work, chain.terms))
    else:
        results = [work(t) for t in chain.terms]
    values = [r[0] for r in results]
    deltas = [r[1] for r in results]
    nodes = sum(r[2] for r in results)
    if include_tails:
        for ray in chain.rays:
            v, dlt, nn = integrate_unbounded_tail(I, ray, with_error=True)
            values.append(v)
            deltas.append(dlt)
            nodes += nn
    if any(not math.isfinite(d) for d in deltas):
        raise NonConvergence("cell quadrature did not converge within %d nodes" % m_max, deltas)
    return PeriodReport(_fsum_complex(values), math.fsum(deltas), len(values), nodes,
                        [{"value": v, "delta": d} for v, d in zip(values, deltas)])


# ---------------------------------------------------------------- unbounded tails


def _growth(I: TwistedIntegrand, t0, direction):
    ph = I.phase
    if ph.kind == LINEAR:
        g = float(sum(float(c) * d for c, d in zip(ph.f.linear, direction)))
        if g <= 0:
            raise NonDecayingDirection("Re f does not increase along the ray: no rapid decay")
        return lambda s: g
    if ph.kind == QUADRATIC:
        dd = float(np.dot(direction, direction))
        if dd == 0:
            raise NonDecayingDirection("zero direction")
        td = float(np.dot(t0, direction))
        return lambda s: 2 * (td + s * dd)
    raise NonDecayingDirection("no exponential phase: unbounded cycles are not rapid decay")


def _ray_panel(I, ray, a, b, m, base_logs_at_a):
    x, w = np.polynomial.legendre.leggauss(m)
    s = a + 0.5 * (b - a) * (x + 1)
    t0 = np.asarray(ray.start, dtype=float)
    d = np.asarray(ray.direction, dtype=float)

    def pts(p):
        return (t0[:, None] + d[:, None] * np.asarray(p)[None, :]).astype(complex)

    path = np.concatenate([[a], s, [b]])
    logs = _transport(lambda p: I.linear_values(pts(p)), path, base_logs_at_a)
    vals = I.evaluate(pts(s), logs[:, 1:-1])
    return complex(np.sum(vals * w) * 0.5 * (b - a)), logs[:, -1]


def integrate_unbounded_tail(I: TwistedIntegrand, ray: Ray, m: int = 32, with_error: bool = False):
    """Integral over ``start + s * direction`` for s in [0, inf) with Re f growing.

    Panels of width about one decay length are added until the integrand
    bound (polynomial times exp(-Re f)) makes the remainder below 1e-16 of
    the running total.
    """
    t0 = np.asarray(ray.start, dtype=float)
    d = np.asarray(ray.direction, dtype=float)
    growth = _growth(I, t0, d)
    base = np.array(ray.base_args)

    def logs_at(s):
        L = I.linear_values((t0 + d * s).astype(complex).reshape(-1, 1))[:, 0]
        return np.log(np.abs(L)) + 1j * base

    total, total2 = 0j, 0j
    a = 0.0
    L0 = I.linear_values(t0.astype(complex).reshape(-1, 1))[:, 0]
    on_wall = np.abs(L0) < 1e-14
    if on_wall.any():
        # integrable endpoint singularity: geometric panels shrinking towards the wall
        e = min(float(np.sum(I.alphas[on_wall].real + np.array(p)[on_wall])) for c, p in I.form if c)
        if e <= -1:
            raise QuadratureError("ray starts on a wall where the integrand is not integrable")
        g = growth(0.0)
        a = 1.0 / g if g > 1e-3 else 1.0
        hi = a
        for _ in range(4000):
            lo = hi / 2
            v, _ = _ray_panel(I, ray, lo, hi, m, logs_at(lo))
            v2, _ = _ray_panel(I, ray, lo, hi, 2 * m, logs_at(lo))
            total += v
            total2 += v2
            pt = (t0 + d * lo).astype(complex).reshape(-1, 1)
            rest = abs(I.evaluate(pt, logs_at(lo).reshape(-1, 1))[0]) * lo / (e + 1)
            hi = lo
            if rest < 1e-17 * max(abs(total2), 1e-300):
                break
        else:
            raise NonConvergence("endpoint singularity of the tail did not resolve")
    logs_a = logs_at(a)
    logs_a2 = logs_a.copy()
    small = 0
    for _ in range(100000):
        g = growth(a)
        h = 1.0 / g if g > 1e-3 else 1.0
        h = min(h, 1.0 + a)
        b = a + h
        v, logs_a = _ray_panel(I, ray, a, b, m, logs_a)
        v2, logs_a2 = _ray_panel(I, ray, a, b, 2 * m, logs_a2)
        total += v
        total2 += v2
        # remainder bound: |F(b)| / g for polynomial x exponential decay
        pt = (t0 + d * b).astype(complex).reshape(-1, 1)
        Fb = abs(I.evaluate(pt, logs_a.reshape(-1, 1))[0])
        gb = growth(b)
        bound = Fb / gb if gb > 0 else math.inf
        if bound < 1e-16 * max(abs(total2), 1e-300) and abs(v2) < 1e-16 * max(abs(total2), 1e-300):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        a = b
    else:
        raise NonConvergence("tail integral did not decay")
    if with_error:
        return total2, abs(total2 - total) + bound, 0
    return total2
