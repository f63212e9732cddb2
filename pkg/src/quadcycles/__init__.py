"""Rational periodic points of x -> x^2 - c, checked exactly."""

from .dynamics import OrbitKind, OrbitResult, QuadParam, classify, cycle_of, escape_bound, numerator_map, phi
from .numbers import factor, parse_rational, supp, v_p
from .solver import PeriodicSet, candidate_numerators, preimages, solve

__all__ = [
    "OrbitKind",
    "OrbitResult",
    "PeriodicSet",
    "QuadParam",
    "candidate_numerators",
    "classify",
    "cycle_of",
    "escape_bound",
    "factor",
    "numerator_map",
    "parse_rational",
    "phi",
    "preimages",
    "solve",
    "supp",
    "v_p",
]

__version__ = "0.1.0"
