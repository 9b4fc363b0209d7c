"""Gamma, Beta and hypergeometric series used as independent oracles."""

from __future__ import annotations

import cmath
import math

# Lanczos approximation, g = 7, 9 coefficients
_G = 7
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


class SeriesDomainError(ValueError):
    pass


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def gamma(z) -> complex:
    """Complex Gamma function; reflection for Re z < 1/2."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise ValueError("Gamma has a pole at %s" % z)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1 - z))
    z -= 1
    x = _COEF[0]
    for i in range(1, _G + 2):
        x += _COEF[i] / (z + i)
    t = z + _G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def beta(a, b) -> complex:
    return gamma(a) * gamma(b) / gamma(complex(a) + complex(b))


def _series(term_ratio, z, max_terms=100000):
    total = 1 + 0j
    term = 1 + 0j
    for k in range(max_terms):
        term *= term_ratio(k) * z
        total += term
        if term == 0 or abs(term) < 1e-17 * abs(total):
            # one more check guards against a single accidental small term
            nxt = term * term_ratio(k + 1) * z
            if abs(nxt) < 1e-17 * abs(total):
                return total
    raise ArithmeticError("series did not converge in %d terms" % max_terms)


def gauss_2f1(a, b, c, x) -> complex:
    """Power series of 2F1(a, b; c; x), restricted to |x| < 0.9."""
    a, b, c, x = complex(a), complex(b), complex(c), complex(x)
    if abs(x) >= 0.9:
        raise SeriesDomainError("|x| = %g is outside the series domain |x| < 0.9" % abs(x))
    if _is_nonpositive_integer(c):
        raise SeriesDomainError("c = %s is a pole" % c)
    if x == 0:
        return 1 + 0j
    return _series(lambda k: (a + k) * (b + k) / ((c + k) * (k + 1)), x)


def kummer_1f1(a, c, z) -> complex:
    """Entire power series of 1F1(a; c; z)."""
    a, c, z = complex(a), complex(c), complex(z)
    if _is_nonpositive_integer(c):
        raise SeriesDomainError("c = %s is a pole" % c)
    if z == 0:
        return 1 + 0j
    return _series(lambda k: (a + k) / ((c + k) * (k + 1)), z)
