"""Exact rational affine geometry of real hyperplane arrangements."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .lp import OPTIMAL, solve_lp_free

Rat = Fraction


class GeometryError(ValueError):
    pass


class InfeasibleSignVector(GeometryError):
    pass


class NonTransversalSlice(GeometryError):
    def __init__(self, message, flat=None):
        super().__init__(message)
        self.flat = flat


def as_rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


def sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Hyperplane:
    """Zero set of ``a_0 + a_1 t_1 + ... + a_n t_n``."""

    coeffs: tuple[Fraction, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rat(c) for c in self.coeffs))

    @property
    def dim(self) -> int:
        return len(self.coeffs) - 1

    @property
    def const(self) -> Fraction:
        return self.coeffs[0]

    @property
    def normal(self) -> tuple[Fraction, ...]:
        return self.coeffs[1:]

    def is_degenerate(self) -> bool:
        return not any(self.normal)


@dataclass(frozen=True)
class Arrangement:
    dim: int
    hyperplanes: tuple[Hyperplane, ...]
    include_infinity: bool = True

    def __post_init__(self):
        hs = tuple(h if isinstance(h, Hyperplane) else Hyperplane(tuple(h)) for h in self.hyperplanes)
        object.__setattr__(self, "hyperplanes", hs)
        for j, h in enumerate(hs):
            if h.dim != self.dim:
                raise GeometryError("hyperplane %d has dimension %d, arrangement has %d" % (j, h.dim, self.dim))
            if self.dim > 0 and h.is_degenerate():
                raise GeometryError("hyperplane %d has zero normal vector" % j)
        seen = {}
        for j, h in enumerate(hs):
            key = projective_key(h.coeffs)
            if key in seen:
                raise GeometryError("hyperplanes %d and %d coincide" % (seen[key], j))
            seen[key] = j

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], labels=None) -> "Arrangement":
        rows = [tuple(as_rat(v) for v in r) for r in rows]
        if not rows:
            raise GeometryError("need at least one hyperplane")
        labels = labels or ["A%d" % (j + 1) for j in range(len(rows))]
        return cls(len(rows[0]) - 1, tuple(Hyperplane(r, lab) for r, lab in zip(rows, labels)))

    def __len__(self):
        return len(self.hyperplanes)

    def rows(self) -> list[tuple[Fraction, ...]]:
        return [h.coeffs for h in self.hyperplanes]


def projective_key(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Normalise a covector up to a nonzero scalar."""
    lead = next(c for c in coeffs if c)
    return tuple(c / lead for c in coeffs)


def eval_hyperplane(h: Hyperplane, p: Sequence) -> Fraction:
    if len(p) != h.dim:
        raise GeometryError("point has dimension %d, hyperplane expects %d" % (len(p), h.dim))
    return h.const + sum((a * as_rat(x) for a, x in zip(h.normal, p)), Fraction(0))


def sign_vector_of(A: Arrangement, p: Sequence) -> tuple[int, ...]:
    return tuple(sign(eval_hyperplane(h, p)) for h in A.hyperplanes)


# ---------------------------------------------------------------- linear algebra


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank by fraction Gaussian elimination."""
    M = [[as_rat(v) for v in r] for r in rows]
    if not M:
        return 0
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, len(M)):
            if M[i][c]:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return r


def nullspace_vector(rows: Sequence[Sequence], ncols: int) -> tuple[Fraction, ...] | None:
    """A nonzero exact kernel vector of ``rows`` or None when the kernel is trivial."""
    M = [[as_rat(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        M[r] = [v / M[r][c] for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    v = [Fraction(0)] * ncols
    v[fc] = Fraction(1)
    for i, pc in enumerate(pivots):
        v[pc] = -M[i][fc]
    return tuple(v)


def solve_square(M: Sequence[Sequence], rhs: Sequence) -> tuple[Fraction, ...]:
    n = len(M)
    aug = [[as_rat(v) for v in row] + [as_rat(b)] for row, b in zip(M, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise GeometryError("singular system")
        aug[c], aug[piv] = aug[piv], aug[c]
        aug[c] = [v / aug[c][c] for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return tuple(row[-1] for row in aug)


# ---------------------------------------------------------------- LP queries


def sign_vector_feasible(A: Arrangement, s: Sequence[int]):
    """Exact interior witness of the open cell with signs ``s`` or None.

    Maximises one slack margin ``delta`` with ``s_j l_j(p) >= delta`` and
    ``0 <= delta <= 1``; the cell is nonempty iff the optimum is positive.
    """
    if len(s) != len(A):
        raise GeometryError("sign vector length %d does not match %d hyperplanes" % (len(s), len(A)))
    if any(v not in (1, -1) for v in s):
        raise GeometryError("sign vector must be zero-free")
    n = A.dim
    if n == 0:
        ok = all(sign(h.const) == sj for h, sj in zip(A.hyperplanes, s))
        return () if ok else None
    # variables: p_1..p_n (free), delta
    c = [0] * n + [1]
    rows, rhs = [], []
    for h, sj in zip(A.hyperplanes, s):
        rows.append([-sj * a for a in h.normal] + [1])
        rhs.append(sj * h.const)
    rows.append([0] * n + [1])
    rhs.append(1)
    res = solve_lp_free(c, rows, rhs, [True] * n + [False])
    if res.status != OPTIMAL or res.value <= 0:
        return None
    return res.x[:n]


def recession_direction(A: Arrangement, s: Sequence[int]):
    """Nonzero direction in the recession cone of the cell ``s``, or None if bounded."""
    n = A.dim
    if n == 0:
        return None
    normals = [h.normal for h in A.hyperplanes]
    kernel = nullspace_vector(normals, n)
    if kernel is not None:
        return kernel
    # normals span: the cone is pointed, so it is nontrivial iff some d in it
    # has sum_j s_j a_j.d > 0
    c = [sum(sj * h.normal[k] for h, sj in zip(A.hyperplanes, s)) for k in range(n)]
    rows = [[-sj * a for a in h.normal] for h, sj in zip(A.hyperplanes, s)]
    rhs = [0] * len(rows)
    for k in range(n):
        e = [0] * n
        e[k] = 1
        rows.append(e)
        rows.append([-v for v in e])
        rhs += [1, 1]
    res = solve_lp_free(c, rows, rhs, [True] * n)
    if res.value > 0:
        return res.x
    return None


def recession_cone_trivial(A: Arrangement, s: Sequence[int]) -> bool:
    if sign_vector_feasible(A, s) is None:
        raise InfeasibleSignVector("sign vector %r is not realised" % (tuple(s),))
    return recession_direction(A, s) is None


# ---------------------------------------------------------------- flats


@dataclass(frozen=True)
class Flat:
    members: frozenset
    codim: int
    closure: frozenset

    @property
    def is_maximal(self) -> bool:
        return self.members == self.closure


def _affine_closure(A: Arrangement, idx: Iterable[int]) -> tuple[frozenset, int] | None:
    """Closure and codimension of the affine intersection, or None if empty."""
    idx = sorted(idx)
    rows = [A.hyperplanes[j].coeffs for j in idx]
    normals = [A.hyperplanes[j].normal for j in idx]
    r = rank(normals)
    if rank(rows) != r:
        return None
    closure = frozenset(
        k for k, h in enumerate(A.hyperplanes) if k in idx or rank(rows + [h.coeffs]) == r
    )
    return closure, r


def flats_up_to_codim2(A: Arrangement) -> list[Flat]:
    flats = []
    for j in range(len(A)):
        cl, r = _affine_closure(A, [j])
        flats.append(Flat(frozenset([j]), r, cl))
    seen = set()
    for i, j in itertools.combinations(range(len(A)), 2):
        got = _affine_closure(A, [i, j])
        if got is None or got[1] != 2 or got[0] in seen:
            continue
        seen.add(got[0])
        flats.append(Flat(got[0], 2, got[0]))
    return flats


def affine_flats(A: Arrangement) -> list[Flat]:
    """All nonempty affine flats (every codimension), as closed subfamilies."""
    out = {}
    frontier = []
    for j in range(len(A)):
        cl, r = _affine_closure(A, [j])
        if cl not in out:
            out[cl] = r
            frontier.append(cl)
    while frontier:
        nxt = []
        for cl in frontier:
            for k in range(len(A)):
                if k in cl:
                    continue
                got = _affine_closure(A, cl | {k})
                if got is not None and got[0] not in out:
                    out[got[0]] = got[1]
                    nxt.append(got[0])
        frontier = nxt
    return [Flat(cl, r, cl) for cl, r in sorted(out.items(), key=lambda kv: (kv[1], sorted(kv[0])))]


def coned_covectors(A: Arrangement) -> list[tuple[Fraction, ...]]:
    """Covectors (a_0, ..., a_n) followed by the hyperplane at infinity (1, 0, ..., 0)."""
    rows = [h.coeffs for h in A.hyperplanes]
    rows.append(tuple([Fraction(1)] + [Fraction(0)] * A.dim))
    return rows


def projective_flats(rows: Sequence, dim: int | None = None, rank_fn=None) -> list[Flat]:
    """Flats of the central arrangement of covectors ``rows`` with nonzero intersection.

    Returned closures index into ``rows``; used with :func:`coned_covectors`
    they are the flats of the projective closure, including those at infinity.
    ``rank_fn`` replaces exact rank when rows are not plain rational vectors.
    """
    rows = list(rows)
    rank_fn = rank_fn or rank
    if dim is None:
        dim = len(rows[0]) if rows else 0

    def closure(idx):
        sub = [rows[k] for k in idx]
        r = rank_fn(sub)
        return frozenset(k for k in range(len(rows)) if k in idx or rank_fn(sub + [rows[k]]) == r), r

    out = {}
    frontier = []
    for j in range(len(rows)):
        cl, r = closure({j})
        if r < dim and cl not in out:
            out[cl] = r
            frontier.append(cl)
    while frontier:
        nxt = []
        for cl in frontier:
            for k in range(len(rows)):
                if k in cl:
                    continue
                c2, r2 = closure(set(cl) | {k})
                if r2 < dim and c2 not in out:
                    out[c2] = r2
                    nxt.append(c2)
        frontier = nxt
    return [Flat(cl, r, cl) for cl, r in sorted(out.items(), key=lambda kv: (kv[1], sorted(kv[0])))]


def is_boolean_through_origin(A: Arrangement, coned: bool = True) -> bool:
    """Boolean test of the central arrangement attached to ``A``.

    ``coned=True``: the covectors (a_0, ..., a_n) together with the hyperplane
    at infinity; every (n+1)-subset must be independent (general position).
    ``coned=False``: the linear parts (a_1, ..., a_n); every n-subset must be
    independent.
    """
    rows = coned_covectors(A) if coned else [h.normal for h in A.hyperplanes]
    width = A.dim + 1 if coned else A.dim
    k = min(width, len(rows))
    return all(rank(sub) == k for sub in itertools.combinations(rows, k))


def vertices(A: Arrangement) -> list[tuple[Fraction, ...]]:
    """Distinct points where n hyperplanes with independent normals meet."""
    n = A.dim
    pts = set()
    for sub in itertools.combinations(A.hyperplanes, n):
        M = [h.normal for h in sub]
        if rank(M) < n:
            continue
        pts.add(solve_square(M, [-h.const for h in sub]))
    return sorted(pts)


# ---------------------------------------------------------------- slices


@dataclass(frozen=True)
class AffineFunctional:
    """``f(t) = c_0 + c_1 t_1 + ... + c_n t_n``."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rat(c) for c in self.coeffs))

    @property
    def linear(self):
        return self.coeffs[1:]

    def __call__(self, p):
        return self.coeffs[0] + sum((a * as_rat(x) for a, x in zip(self.linear, p)), Fraction(0))

    def is_constant(self):
        return not any(self.linear)


@dataclass(frozen=True)
class Slice:
    """Arrangement induced on ``{f = R}`` with its affine parametrisation.

    The embedded point of intrinsic coordinates ``q`` is ``origin + basis^T q``.
    ``kept[i]`` is the ambient index of induced hyperplane ``i``.
    """

    arrangement: Arrangement
    kept: tuple[int, ...]
    dropped_var: int
    origin: tuple[Fraction, ...]
    basis: tuple[tuple[Fraction, ...], ...]
    value: Fraction
    parallel: tuple[int, ...] = field(default=())

    def embed(self, q: Sequence) -> tuple[Fraction, ...]:
        pt = list(self.origin)
        for qi, vec in zip(q, self.basis):
            for k in range(len(pt)):
                pt[k] += as_rat(qi) * vec[k]
        return tuple(pt)


def slice_parametrisation(f: AffineFunctional, R):
    """Origin and direction vectors of ``{f = R}``, dropping the variable with largest |c_k|."""
    if f.is_constant():
        raise GeometryError("phase functional is constant")
    R = as_rat(R)
    n = len(f.linear)
    k = max(range(n), key=lambda i: (abs(f.linear[i]), -i))
    ck = f.linear[k]
    origin = [Fraction(0)] * n
    origin[k] = (R - f.coeffs[0]) / ck
    basis = []
    for i in range(n):
        if i == k:
            continue
        v = [Fraction(0)] * n
        v[i] = Fraction(1)
        v[k] = -f.linear[i] / ck
        basis.append(tuple(v))
    return k, tuple(origin), tuple(basis)


def slice_arrangement(A: Arrangement, f: AffineFunctional, R, check_transversal: bool = True) -> Slice:
    """Arrangement induced on the affine hyperplane ``{f = R}``.

    Hyperplanes missing the slice (parallel to it) are omitted; a hyperplane
    equal to the slice is a non-transversal slice and raises.
    """
    R = as_rat(R)
    k, origin, basis = slice_parametrisation(f, R)
    induced, kept, parallel = [], [], []
    for j, h in enumerate(A.hyperplanes):
        const = eval_hyperplane(h, origin)
        lin = tuple(sum((a * v for a, v in zip(h.normal, vec)), Fraction(0)) for vec in basis)
        if not any(lin):
            if const == 0:
                raise NonTransversalSlice("hyperplane %d coincides with the slice" % j, flat=frozenset([j]))
            parallel.append(j)
            continue
        induced.append(Hyperplane((const,) + lin, h.label))
        kept.append(j)
    if check_transversal:
        for fl in affine_flats(A):
            normals = [A.hyperplanes[j].normal for j in fl.closure]
            if rank(normals + [f.linear]) == fl.codim:
                # f is constant on the flat; the slice contains it iff values agree
                pt = _flat_point(A, fl.closure)
                if f(pt) == R:
                    raise NonTransversalSlice(
                        "slice f=%s contains the flat %s" % (R, sorted(fl.closure)), flat=fl.closure
                    )
    sub = Arrangement(A.dim - 1, tuple(induced))
    return Slice(sub, tuple(kept), k, origin, basis, R, tuple(parallel))


def _flat_point(A: Arrangement, idx) -> tuple[Fraction, ...]:
    idx = sorted(idx)
    rows = [list(A.hyperplanes[j].normal) + [-A.hyperplanes[j].const] for j in idx]
    # reduced row echelon, free variables set to zero
    n = A.dim
    M = [[as_rat(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        M[r] = [v / M[r][c] for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                fct = M[i][c]
                M[i] = [a - fct * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    pt = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        pt[c] = M[i][-1]
    return tuple(pt)
