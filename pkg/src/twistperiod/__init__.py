"""Chambers of real hyperplane arrangements, rapid-decay cycle bases and twisted period integrals."""

from .chambers import ChamberCensus, enumerate_chambers
from .connection import ComplexRational, ExponentData, is_asymptotically_generic, is_generic
from .geometry import AffineFunctional, Arrangement, Hyperplane
from .quadrature import TwistedIntegrand, integrate_chain
from .rdbasis import PhaseSpec, rd_basis
from .regularization import regularize_bounded, regularize_truncated

__all__ = [
    "AffineFunctional",
    "Arrangement",
    "ChamberCensus",
    "ComplexRational",
    "ExponentData",
    "Hyperplane",
    "PhaseSpec",
    "TwistedIntegrand",
    "enumerate_chambers",
    "integrate_chain",
    "is_asymptotically_generic",
    "is_generic",
    "rd_basis",
    "regularize_bounded",
    "regularize_truncated",
]

__version__ = "0.1.0"
