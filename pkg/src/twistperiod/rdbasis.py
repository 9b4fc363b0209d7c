"""Bases of rapid-decay homology for linear and quadratic exponential phases."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .chambers import Chamber, ChamberCensus, enumerate_chambers, schlafli_bounded_count
from .connection import ExponentData, Verdict, is_asymptotically_generic, is_generic
from .geometry import (
    AffineFunctional,
    Arrangement,
    affine_flats,
    as_rat,
    is_boolean_through_origin,
    rank,
    sign_vector_of,
    slice_arrangement,
    solve_square,
    vertices,
)

LINEAR = "linear"
QUADRATIC = "quadratic"
NONE = "none"


class PreconditionError(ValueError):
    """Input violates a hypothesis of the basis theorems; ``reason`` is machine readable."""

    def __init__(self, reason: str, certificates=()):
        super().__init__(reason)
        self.reason = reason
        self.certificates = list(certificates) or [reason]


class RankMismatch(AssertionError):
    pass


class AmbiguousLift(PreconditionError):
    pass


@dataclass(frozen=True)
class PhaseSpec:
    kind: str = NONE
    f: AffineFunctional | None = None
    R: Fraction | None = None  # None means "choose automatically"

    def __post_init__(self):
        if self.kind not in (NONE, LINEAR, QUADRATIC):
            raise ValueError("unknown phase kind %r" % self.kind)
        if self.kind == LINEAR:
            if self.f is None or self.f.is_constant():
                raise ValueError("linear phase needs a nonconstant functional")
        if self.R is not None:
            object.__setattr__(self, "R", as_rat(self.R))

    def value(self, p):
        """Phase value at a (real or complex) point, as a float/complex."""
        if self.kind == LINEAR:
            return float(self.f.coeffs[0]) + sum(float(c) * x for c, x in zip(self.f.linear, p))
        if self.kind == QUADRATIC:
            return sum(x * x for x in p)
        return 0.0

    def with_R(self, R) -> "PhaseSpec":
        return PhaseSpec(self.kind, self.f, R)


@dataclass(frozen=True)
class Truncation:
    chamber: Chamber
    slice_witness: tuple | None = None


@dataclass
class RdBasis:
    phase: PhaseSpec
    R: Fraction | None
    bounded: list[Chamber]
    truncated: list[Truncation]
    slice_bounded: int = 0
    hypotheses: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.bounded) + len(self.truncated)

    def in_degree(self, p: int, n: int):
        """Basis cycles of degree ``p``; the homology is concentrated in degree ``n``."""
        if p != n:
            return []
        return [c for c in self.bounded] + [t.chamber for t in self.truncated]

    def sign_sets(self):
        return (
            frozenset(c.sign for c in self.bounded),
            frozenset(t.chamber.sign for t in self.truncated),
        )


def default_R(A: Arrangement, phase: PhaseSpec) -> Fraction:
    vs = vertices(A)
    if phase.kind == LINEAR:
        m = max((abs(phase.f(v)) for v in vs), default=Fraction(0))
        return 2 * (1 + m)
    if phase.kind == QUADRATIC:
        m = max((sum(x * x for x in v) for v in vs), default=Fraction(0))
        return 2 * (1 + m)
    raise ValueError("phase of kind %r has no threshold" % phase.kind)


def _require(verdict: Verdict, what: str):
    if verdict.ok is None:
        raise PreconditionError("%s: undecided" % what, verdict.certificates)
    if not verdict.ok:
        raise PreconditionError(verdict.reason, verdict.certificates)


def _truncated_linear(A: Arrangement, census: ChamberCensus, f: AffineFunctional, R: Fraction):
    sl = slice_arrangement(A, f, R)
    sub_census = enumerate_chambers(sl.arrangement)
    out = {}
    n_sb = 0
    for ch in sub_census.chambers:
        if not ch.bounded:
            continue
        n_sb += 1
        p = sl.embed(ch.witness)
        s = sign_vector_of(A, p)
        amb = census.by_sign(s)
        if amb is None or amb.bounded:
            raise AssertionError("lifted slice chamber does not land in an unbounded chamber")
        if amb.id in out:
            raise AmbiguousLift(
                "basis: two bounded slice chambers lie in ambient chamber %d" % amb.id
            )
        out[amb.id] = Truncation(amb, tuple(ch.witness))
    return [out[k] for k in sorted(out)], n_sb


def rd_basis_linear(A: Arrangement, E: ExponentData, f: AffineFunctional, R=None,
                    census: ChamberCensus | None = None, check: bool = True) -> RdBasis:
    """Bounded chambers plus the unbounded chambers met by bounded chambers of ``{f = R}``."""
    phase = PhaseSpec(LINEAR, f, R)
    if check:
        _require(is_generic(A, E), "genericity")
        _require(is_asymptotically_generic(A, E, f), "asymptotic genericity")
    census = census or enumerate_chambers(A)
    R = as_rat(R) if R is not None else default_R(A, phase)
    truncated, n_sb = _truncated_linear(A, census, f, R)
    bounded = [c for c in census.chambers if c.bounded]
    return RdBasis(phase.with_R(R), R, bounded, truncated, n_sb)


def _min_sq_dist_to_flat(A: Arrangement, idx) -> Fraction:
    rows = [A.hyperplanes[j] for j in sorted(idx)]
    # keep an independent subset of rows
    chosen = []
    for h in rows:
        if rank([c.normal for c in chosen] + [h.normal]) > len(chosen):
            chosen.append(h)
    M = [h.normal for h in chosen]
    b = [-h.const for h in chosen]
    G = [[sum(x * y for x, y in zip(r1, r2)) for r2 in M] for r1 in M]
    y = solve_square(G, b)
    return sum(bi * yi for bi, yi in zip(b, y))


def quadratic_hypotheses(A: Arrangement, R: Fraction) -> dict:
    """Exactly decidable hypotheses of the hypersphere theorem; the rest are marked assumed."""
    boolean = is_boolean_through_origin(A, coned=False)
    far = max((_min_sq_dist_to_flat(A, fl.closure) for fl in affine_flats(A)), default=Fraction(0))
    return {
        "boolean_central": boolean,
        "sphere_transversal_to_flats": R > far,
        "normal_crossing_at_infinity": "assumed",
    }


def rd_basis_quadratic(A: Arrangement, E: ExponentData, R=None,
                       census: ChamberCensus | None = None, check: bool = True) -> RdBasis:
    """Bounded chambers plus every unbounded chamber cut by ``{sum t_i^2 < R}``."""
    phase = PhaseSpec(QUADRATIC)
    R = as_rat(R) if R is not None else default_R(A, phase)
    hyp = quadratic_hypotheses(A, R)
    if check:
        if not hyp["boolean_central"]:
            raise PreconditionError("basis: central arrangement is not Boolean")
        if not hyp["sphere_transversal_to_flats"]:
            raise PreconditionError("basis: sphere {|t|^2=R} not transversal to every flat")
        if E.rank == 1:
            for j, a in enumerate(E.alphas):
                if a.is_integer():
                    raise PreconditionError("genericity: integer eigenvalue at j=%d" % (j + 1))
        else:
            _require(is_generic(A, E), "genericity")
    census = census or enumerate_chambers(A)
    bounded = [c for c in census.chambers if c.bounded]
    truncated = [Truncation(c) for c in census.chambers if not c.bounded]
    return RdBasis(phase.with_R(R), R, bounded, truncated, hypotheses=hyp)


def rd_basis(A: Arrangement, E: ExponentData, phase: PhaseSpec,
             census: ChamberCensus | None = None, check: bool = True) -> RdBasis:
    if phase.kind == LINEAR:
        return rd_basis_linear(A, E, phase.f, phase.R, census, check)
    if phase.kind == QUADRATIC:
        return rd_basis_quadratic(A, E, phase.R, census, check)
    if check:
        _require(is_generic(A, E), "genericity")
    census = census or enumerate_chambers(A)
    return RdBasis(phase, None, [c for c in census.chambers if c.bounded], [])


def rank_cross_check(A: Arrangement, E: ExponentData, phase: PhaseSpec,
                     basis: RdBasis | None = None, census: ChamberCensus | None = None) -> dict:
    """Compare the basis size with the exact-sequence prediction.

    Linear phase: b(A) + b(slice), with the slice census recomputed
    independently.  Quadratic phase: b(A) + M(N, n).
    """
    census = census or enumerate_chambers(A)
    basis = basis or rd_basis(A, E, phase, census)
    b_A = census.n_bounded
    if phase.kind == LINEAR:
        sl = slice_arrangement(A, phase.f, basis.R)
        fibre = enumerate_chambers(sl.arrangement).n_bounded
        label = "b(slice)"
    elif phase.kind == QUADRATIC:
        fibre = schlafli_bounded_count(len(A), A.dim)
        label = "M(N,n)"
    else:
        fibre = 0
        label = "none"
    report = {
        "basis_rank": basis.rank,
        "b(A)": b_A,
        label: fibre,
        "predicted": b_A + fibre,
        "ok": basis.rank == b_A + fibre,
    }
    if not report["ok"]:
        raise RankMismatch("basis rank %d != %d + %d" % (basis.rank, b_A, fibre))
    return report


def stability_check(A: Arrangement, E: ExponentData, phase: PhaseSpec,
                    census: ChamberCensus | None = None) -> dict:
    """The basis (as sign-vector sets) must not change when R is doubled."""
    census = census or enumerate_chambers(A)
    b1 = rd_basis(A, E, phase, census, check=False)
    if b1.R is None:
        return {"R": None, "stable": True}
    b2 = rd_basis(A, E, phase.with_R(2 * b1.R), census, check=False)
    return {"R": str(b1.R), "R_doubled": str(2 * b1.R), "stable": b1.sign_sets() == b2.sign_sets()}
