"""Complete rational periodic and preperiodic sets of x -> x^2 - c."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .dynamics import (
    DEFAULT_MAX_ITER,
    OrbitKind,
    ParamLike,
    QuadParam,
    as_param,
    classify,
    escape_bound,
)
from .numbers import RationalLike, as_rational, format_rational, rational_sqrt, sqrt_mod

NOT_SQUARE_REASON = "denominator not a perfect square"


def candidate_numerators(c: ParamLike) -> list[int]:
    """Every integer that can be the numerator of a preperiodic point.

    These are the ``X`` with ``|X| <= d * beta`` and ``X**2 = a mod d``; the
    square-root classes mod ``d`` are assembled prime power by prime power.
    Empty when ``den(c)`` is not a square.
    """
    c = as_param(c)
    if c.d is None:
        return []
    d = c.d
    beta = escape_bound(c)
    limit = math.floor(beta * d)
    out: list[int] = []
    for r in sqrt_mod(c.a, c.d_factorization):
        # smallest X = r mod d with X >= -limit
        start = r - ((r + limit) // d) * d
        out.extend(range(start, limit + 1, d))
    out.sort()
    return out


def _rotate_min_first(cycle: Sequence[Fraction]) -> tuple[Fraction, ...]:
    k = min(range(len(cycle)), key=cycle.__getitem__)
    return tuple(cycle[k:]) + tuple(cycle[:k])


@dataclass(frozen=True)
class PeriodicSet:
    """Per(phi_c) split into cycles, plus the strictly preperiodic points.

    ``m_classes`` counts residues of periodic numerators mod ``d``;
    ``preper_classes`` does the same for all of PrePer (periodic included).
    """

    c: QuadParam
    cycles: tuple[tuple[Fraction, ...], ...]
    per: tuple[Fraction, ...]
    preper: tuple[Fraction, ...]
    num_per: tuple[int, ...]
    m_classes: int
    preper_classes: int
    reason: str | None = None

    @classmethod
    def from_cycles(
        cls,
        c: ParamLike,
        cycles: Iterable[Sequence[RationalLike]],
        preper: Iterable[RationalLike] = (),
        reason: str | None = None,
    ) -> "PeriodicSet":
        """Assemble a set from cycles given in orbit order; derived fields are computed."""
        c = as_param(c)
        cyc = [_rotate_min_first([as_rational(x) for x in cy]) for cy in cycles]
        cyc.sort()
        per = tuple(sorted(x for cy in cyc for x in cy))
        pre = tuple(sorted(as_rational(x) for x in preper))
        d = c.d or 1
        num_per = tuple(x.numerator for x in per)
        m = len({X % d for X in num_per})
        pm = len({x.numerator % d for x in per + pre})
        return cls(c, tuple(cyc), per, pre, num_per, m, pm, reason)

    @property
    def d(self) -> int | None:
        return self.c.d

    @property
    def s(self) -> int:
        return self.c.s

    @property
    def cycle_lengths(self) -> tuple[int, ...]:
        return tuple(sorted(len(cy) for cy in self.cycles))

    @property
    def max_cycle_length(self) -> int:
        return max((len(cy) for cy in self.cycles), default=0)

    def cycle_numerators(self) -> list[tuple[int, ...]]:
        return [tuple(x.numerator for x in cy) for cy in self.cycles]

    def to_dict(self) -> dict:
        d = self.c.d

        def fmt(x: Fraction) -> str:
            # every point has denominator d, keep it explicit even when d = 1
            return f"{x.numerator}/{x.denominator}"

        return {
            "c": format_rational(self.c.c),
            "d": d,
            "s": self.c.s,
            "cycles": [[fmt(x) for x in cy] for cy in self.cycles],
            "per": [fmt(x) for x in self.per],
            "preper": [fmt(x) for x in self.preper],
            "m_classes": self.m_classes,
            "preper_classes": self.preper_classes,
            "reason": self.reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def solve(c: ParamLike, max_iter: int = DEFAULT_MAX_ITER) -> PeriodicSet:
    """Compute Per and the strictly preperiodic points by classifying every candidate."""
    c = as_param(c)
    if c.d is None:
        return PeriodicSet.from_cycles(c, [], [], reason=NOT_SQUARE_REASON)
    d = c.d
    cycles: list[tuple[Fraction, ...]] = []
    on_cycle: set[Fraction] = set()
    preper: list[Fraction] = []
    for X in candidate_numerators(c):
        x = Fraction(X, d)
        res = classify(c, x, max_iter=max_iter)
        if res.kind is OrbitKind.PERIODIC:
            if x not in on_cycle:
                cyc = res.trajectory[: res.period]
                on_cycle.update(cyc)
                cycles.append(cyc)
        elif res.kind is OrbitKind.PREPERIODIC:
            preper.append(x)
    return PeriodicSet.from_cycles(c, cycles, preper)


def preimages(c: ParamLike, y: RationalLike) -> set[Fraction]:
    """All rational ``x`` with ``x**2 - c = y``."""
    c = as_param(c)
    root = rational_sqrt(c.c + as_rational(y))
    if root is None:
        return set()
    return {root, -root}


def backward_closure(c: ParamLike, seeds: Iterable[Fraction]) -> set[Fraction]:
    """Everything reachable from ``seeds`` by repeatedly taking rational preimages."""
    c = as_param(c)
    found = set(seeds)
    frontier = list(found)
    while frontier:
        y = frontier.pop()
        for x in preimages(c, y):
            if x not in found:
                found.add(x)
                frontier.append(x)
    return found
