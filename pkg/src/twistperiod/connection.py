"""Twist data of a logarithmic connection and its flatness/genericity tests.

Exponents are complex rationals so that every integrality question is
decided exactly.  Floating point only appears in :func:`monodromy_factors`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import (
    AffineFunctional,
    Arrangement,
    as_rat,
    coned_covectors,
    eval_hyperplane,
    flats_up_to_codim2,
    projective_flats,
    rank,
    slice_parametrisation,
)


@dataclass(frozen=True, order=True)
class ComplexRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_rat(self.re))
        object.__setattr__(self, "im", as_rat(self.im))

    @classmethod
    def parse(cls, value) -> "ComplexRational":
        """Accept a ComplexRational, a rational-like scalar, or a ``[re, im]`` pair."""
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ValueError("complex rational must be a [re, im] pair")
            return cls(Fraction(value[0]), Fraction(value[1]))
        if isinstance(value, complex):
            return cls(as_rat(value.real), as_rat(value.imag))
        return cls(Fraction(value))

    def __add__(self, other):
        other = ComplexRational.parse(other)
        return ComplexRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-ComplexRational.parse(other))

    def __mul__(self, other):
        o = ComplexRational.parse(other)
        return ComplexRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def to_json(self):
        return [str(self.re), str(self.im)]

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return "%s%+si" % (self.re, self.im) if self.re else "%si" % self.im


def csum(values) -> ComplexRational:
    total = ComplexRational(Fraction(0))
    for v in values:
        total = total + v
    return total


@dataclass(frozen=True)
class ExponentData:
    """Rank-1 exponents ``alphas`` or rank-r residue matrices ``residues``.

    The value at the hyperplane at infinity is always minus the sum.
    """

    alphas: tuple[ComplexRational, ...] = ()
    residues: tuple = ()
    rank: int = 1

    def __post_init__(self):
        if self.rank == 1:
            object.__setattr__(self, "alphas", tuple(ComplexRational.parse(a) for a in self.alphas))
        else:
            import sympy

            mats = tuple(sympy.ImmutableMatrix(_sympify_matrix(P)) for P in self.residues)
            for P in mats:
                if P.shape != (self.rank, self.rank):
                    raise ValueError("residue matrix has shape %r, expected rank %d" % (P.shape, self.rank))
            object.__setattr__(self, "residues", mats)

    @classmethod
    def scalar(cls, alphas) -> "ExponentData":
        return cls(alphas=tuple(alphas))

    @classmethod
    def matrices(cls, residues) -> "ExponentData":
        import sympy

        mats = [sympy.Matrix(_sympify_matrix(P)) for P in residues]
        return cls(residues=tuple(mats), rank=mats[0].shape[0])

    def __len__(self):
        return len(self.alphas) if self.rank == 1 else len(self.residues)

    @property
    def alpha_infinity(self) -> ComplexRational:
        return -csum(self.alphas)

    @property
    def residue_infinity(self):
        import sympy

        total = sympy.zeros(self.rank, self.rank)
        for P in self.residues:
            total += P
        return -total

    def with_infinity(self) -> tuple:
        if self.rank == 1:
            return self.alphas + (self.alpha_infinity,)
        return tuple(self.residues) + (self.residue_infinity,)

    def restrict(self, indices) -> "ExponentData":
        if self.rank == 1:
            return ExponentData(alphas=tuple(self.alphas[j] for j in indices))
        return ExponentData(residues=tuple(self.residues[j] for j in indices), rank=self.rank)


def _sympify_matrix(P):
    import sympy

    def entry(v):
        c = ComplexRational.parse(v) if not isinstance(v, sympy.Basic) else None
        if c is None:
            return v
        return sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
            c.im.numerator, c.im.denominator
        )

    if hasattr(P, "tolist"):
        P = P.tolist()
    return [[entry(v) for v in row] for row in P]


@dataclass
class Verdict:
    """Outcome of a decision procedure.  ``ok`` is None when undecided."""

    ok: bool | None
    certificates: list = field(default_factory=list)

    def __bool__(self):
        return bool(self.ok)

    @property
    def reason(self) -> str:
        return self.certificates[0] if self.certificates else ""


def _label(j, N):
    return "inf" if j == N else str(j + 1)


# ---------------------------------------------------------------- flatness


def check_flatness(A: Arrangement, E: ExponentData) -> Verdict:
    """Commutator condition over every maximal codimension-2 subfamily."""
    if E.rank == 1:
        return Verdict(True)
    if len(E) != len(A):
        raise ValueError("need one residue per hyperplane")
    for fl in flats_up_to_codim2(A):
        if fl.codim != 2:
            continue
        members = sorted(fl.closure)
        total = sum((E.residues[j] for j in members[1:]), E.residues[members[0]])
        for j in members:
            comm = E.residues[j] * total - total * E.residues[j]
            if any(v != 0 for v in comm):
                return Verdict(
                    False,
                    ["flatness: [P_%d, sum over {%s}] != 0" % (j + 1, ",".join(str(k + 1) for k in members))],
                )
    return Verdict(True)


# ---------------------------------------------------------------- genericity


def _integral_eigenvalues(M) -> bool | None:
    """True/False if some eigenvalue is an integer; None when eigenvalues are not Gaussian rationals."""
    import sympy

    lam = sympy.Symbol("lam")
    poly = sympy.Poly(M.charpoly(lam).as_expr(), lam)
    roots = sympy.roots(poly, multiple=True)
    if len(roots) != M.shape[0]:
        return None
    found = False
    for r in roots:
        re, im = sympy.nsimplify(r).as_real_imag()
        re, im = sympy.simplify(re), sympy.simplify(im)
        if not (re.is_rational and im.is_rational):
            return None
        if im == 0 and re.is_integer:
            found = True
    return found


def _is_integral(value) -> bool | None:
    if isinstance(value, ComplexRational):
        return value.is_integer()
    return _integral_eigenvalues(value)


def _generic_from_flats(values, flats, N) -> Verdict:
    """Apply both genericity conditions given exponents (incl. infinity) and projective flats."""
    certs = []
    undecided = False
    order = list(range(N)) + [None]
    for j in range(N):
        got = _is_integral(values[j])
        if got is None:
            undecided = True
        elif got:
            certs.append("genericity: integer eigenvalue at j=%d" % (j + 1))
    for fl in flats:
        q = len(fl.closure)
        if fl.codim >= q:
            continue
        members = sorted(fl.closure)
        total = values[members[0]]
        for k in members[1:]:
            total = total + values[k]
        got = _is_integral(total)
        if got is None:
            undecided = True
        elif got:
            certs.append(
                "genericity: integer eigenvalue of subfamily {%s} (codim %d < %d)"
                % (",".join(_label(k, N) for k in members), fl.codim, q)
            )
    del order
    got = _is_integral(values[N])
    if got is None:
        undecided = True
    elif got:
        certs.append("genericity: integer eigenvalue at j=inf")
    if certs:
        return Verdict(False, certs)
    return Verdict(None if undecided else True, ["genericity: undecided (irrational eigenvalues)"] if undecided else [])


def is_generic(A: Arrangement, E: ExponentData) -> Verdict:
    """Non-integrality of every residue and of every degenerate maximal subfamily sum.

    The scan includes the hyperplane at infinity with residue minus the sum.
    """
    if len(E) != len(A):
        raise ValueError("need %d exponents, got %d" % (len(A), len(E)))
    if A.dim == 0:
        return Verdict(True)
    rows = coned_covectors(A)
    flats = projective_flats(rows, A.dim + 1)
    return _generic_from_flats(E.with_infinity(), flats, len(A))


@dataclass(frozen=True)
class GenericSlice:
    """Slice ``{f = R}`` for symbolic R.

    Each kept hyperplane restricts to a covector whose constant term is
    ``u + v R``; ``rows0``/``rows1`` hold the covectors at R=0 and R=1.
    """

    kept: tuple[int, ...]
    parallel: tuple[int, ...]
    rows0: tuple
    rows1: tuple
    dim: int


def generic_slice(A: Arrangement, f: AffineFunctional) -> GenericSlice:
    k0, origin0, basis = slice_parametrisation(f, 0)
    _, origin1, _ = slice_parametrisation(f, 1)
    kept, parallel, rows0, rows1 = [], [], [], []
    for j, h in enumerate(A.hyperplanes):
        lin = tuple(sum((a * v for a, v in zip(h.normal, vec)), Fraction(0)) for vec in basis)
        if not any(lin):
            parallel.append(j)
            continue
        kept.append(j)
        rows0.append((eval_hyperplane(h, origin0),) + lin)
        rows1.append((eval_hyperplane(h, origin1),) + lin)
    return GenericSlice(tuple(kept), tuple(parallel), tuple(rows0), tuple(rows1), A.dim - 1)


def generic_rank(pairs) -> int:
    # every minor is affine in R, so the generic rank is attained at R=0 or R=1
    if not pairs:
        return 0
    return max(rank([p[0] for p in pairs]), rank([p[1] for p in pairs]))


def is_asymptotically_generic(A: Arrangement, E: ExponentData, f: AffineFunctional) -> Verdict:
    """Genericity of the connection induced on ``{f = R}`` for generic (large) R."""
    if f.is_constant():
        raise ValueError("phase functional is constant")
    sl = generic_slice(A, f)
    if sl.dim == 0 or not sl.kept:
        return Verdict(True)
    inf = tuple([Fraction(1)] + [Fraction(0)] * sl.dim)
    pairs = list(zip(sl.rows0, sl.rows1)) + [(inf, inf)]
    flats = projective_flats(pairs, sl.dim + 1, rank_fn=generic_rank)
    sub = E.restrict(sl.kept)
    verdict = _generic_from_flats(sub.with_infinity(), flats, len(sl.kept))
    # report ambient labels
    remap = {str(i + 1): str(j + 1) for i, j in enumerate(sl.kept)}
    certs = []
    for c in verdict.certificates:
        c = c.replace("genericity:", "asymptotic genericity:")
        if "j=" in c and not c.endswith("inf"):
            idx = c.rsplit("j=", 1)[1]
            c = c.rsplit("j=", 1)[0] + "j=" + remap.get(idx, idx)
        certs.append(c)
    verdict.certificates = certs
    return verdict


# ---------------------------------------------------------------- monodromy


class IntegralExponent(ValueError):
    pass


def monodromy_factor(alpha) -> complex:
    """``exp(2 pi i alpha) - 1`` computed as ``2 i sin(pi a) exp(i pi a)`` with ``a`` reduced mod 1."""
    a = ComplexRational.parse(alpha)
    if a.is_integer():
        raise IntegralExponent("exponent %s is an integer: trivial monodromy" % a)
    shift = math.floor(a.re)
    z = complex(ComplexRational(a.re - shift, a.im))
    return 2j * cmath.sin(math.pi * z) * cmath.exp(1j * math.pi * z)


def monodromy_factors(E: ExponentData) -> tuple[complex, ...]:
    if E.rank != 1:
        raise ValueError("monodromy factors are defined for rank 1 only")
    out = []
    for j, a in enumerate(E.alphas):
        try:
            out.append(monodromy_factor(a))
        except IntegralExponent as exc:
            raise IntegralExponent("j=%d: %s" % (j + 1, exc)) from None
    return tuple(out)
