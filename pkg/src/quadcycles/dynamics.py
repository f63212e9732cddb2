"""Exact iteration of x -> x^2 - c and orbit classification with certificates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .numbers import (
    Factorization,
    RationalLike,
    as_rational,
    factor,
    format_rational,
    integer_sqrt,
    supp,
    v_p,
)

DEFAULT_MAX_ITER = 10**6


@dataclass(frozen=True)
class QuadParam:
    """A parameter ``c`` together with ``a = num(c)`` and ``d`` where ``den(c) = d**2``.

    ``d`` is None when ``den(c)`` is not a perfect square; then no rational
    point is preperiodic. ``s`` counts the primes of ``den(c)``, which are
    those of ``d`` whenever ``d`` exists.
    """

    c: Fraction
    a: int
    d: int | None
    d_factorization: Factorization | None
    s: int

    @classmethod
    def from_rational(cls, c: RationalLike, seed: int = 0) -> "QuadParam":
        c = as_rational(c)
        root, exact = integer_sqrt(c.denominator)
        if exact:
            fac = factor(root, seed=seed)
            return cls(c, c.numerator, root, fac, len(fac))
        return cls(c, c.numerator, None, None, len(supp(c.denominator)))

    @classmethod
    def from_ad(cls, a: int, d: int, seed: int = 0) -> "QuadParam":
        if d < 1 or math.gcd(a, d) != 1:
            raise ValueError(f"need d >= 1 and gcd(a, d) = 1, got a={a}, d={d}")
        fac = factor(d, seed=seed)
        return cls(Fraction(a, d * d), a, d, fac, len(fac))

    @property
    def has_square_denominator(self) -> bool:
        return self.d is not None

    def __str__(self) -> str:
        return format_rational(self.c)


ParamLike = Union[QuadParam, Fraction, int, str]


def as_param(c: ParamLike) -> QuadParam:
    return c if isinstance(c, QuadParam) else QuadParam.from_rational(c)


def phi(c: ParamLike, x: RationalLike) -> Fraction:
    c = as_param(c)
    x = as_rational(x)
    return x * x - c.c


def numerator_map(c: ParamLike, X: int) -> int:
    """The integer map ``X -> (X**2 - a) / d`` on numerators."""
    c = as_param(c)
    if c.d is None:
        raise ValueError(f"den({c}) is not a perfect square")
    if math.gcd(X, c.d) != 1:
        raise ValueError(f"numerator {X} is not coprime to d={c.d}")
    q, r = divmod(X * X - c.a, c.d)
    if r:
        raise ValueError(f"{X}^2 is not congruent to {c.a} mod {c.d}")
    return q


def escape_bound(c: ParamLike) -> Fraction:
    """Smallest ``k/(2d)`` that is at least ``(1 + sqrt(1 + 4|c|)) / 2``.

    Beyond this radius ``|x**2 - c| > |x|``, so absolute values increase
    forever. When ``den(c)`` is not a square the grid ``k/2`` is used.
    """
    c = as_param(c)
    u = c.d if c.d is not None else 1
    target = u * u * (1 + 4 * abs(c.c))
    # least j >= 0 with j*j >= target
    j = math.isqrt(target.numerator // target.denominator)
    while j * j * target.denominator < target.numerator:
        j += 1
    return Fraction(u + j, 2 * u)


# --- classification -----------------------------------------------------------


class OrbitKind(str, enum.Enum):
    PERIODIC = "periodic"
    PREPERIODIC = "preperiodic"
    WANDERING = "wandering"


@dataclass(frozen=True)
class Repeat:
    """``trajectory[i] == trajectory[j]`` with ``i < j`` and no earlier repeat."""

    i: int
    j: int

    def verify(self, trajectory: tuple[Fraction, ...], c: QuadParam) -> bool:
        if not 0 <= self.i < self.j < len(trajectory):
            return False
        if trajectory[self.i] != trajectory[self.j]:
            return False
        if len(set(trajectory[: self.j])) != self.j:
            return False
        return all(phi(c, trajectory[k]) == trajectory[k + 1] for k in range(self.j))

    def to_dict(self) -> dict:
        return {"type": "repeat", "i": self.i, "j": self.j}


@dataclass(frozen=True)
class PadicEscape:
    """At ``trajectory[index]`` the valuation test ``2 v_p(x) != v_p(c)`` fires.

    The prime divides ``den(c) * den(x)``; valuations are compared in doubled
    units so no half-integers appear.
    """

    prime: int
    index: int
    valuation: int | float
    c_valuation: int | float

    def verify(self, trajectory: tuple[Fraction, ...], c: QuadParam) -> bool:
        x = trajectory[self.index]
        p = self.prime
        if (c.c.denominator * x.denominator) % p:
            return False
        return 2 * v_p(x, p) != v_p(c.c, p)

    def to_dict(self) -> dict:
        return {
            "type": "p_adic_escape",
            "prime": self.prime,
            "index": self.index,
            "v_p_x": _json_val(self.valuation),
            "v_p_c": _json_val(self.c_valuation),
        }


@dataclass(frozen=True)
class ArchimedeanEscape:
    bound: Fraction
    index: int

    def verify(self, trajectory: tuple[Fraction, ...], c: QuadParam) -> bool:
        x = trajectory[self.index]
        beta = self.bound
        # beta must dominate the real escape threshold: (2b - 1)^2 >= 1 + 4|c|
        if 2 * beta < 1 or (2 * beta - 1) ** 2 < 1 + 4 * abs(c.c):
            return False
        return abs(x) > beta and abs(phi(c, x)) > abs(x)

    def to_dict(self) -> dict:
        return {"type": "archimedean_escape", "bound": format_rational(self.bound), "index": self.index}


Certificate = Union[Repeat, PadicEscape, ArchimedeanEscape]


def _json_val(v: int | float) -> int | str:
    return "inf" if v == math.inf else int(v)


@dataclass(frozen=True)
class OrbitResult:
    kind: OrbitKind
    trajectory: tuple[Fraction, ...]
    certificate: Certificate
    tail: int | None = None
    period: int | None = None

    def verify(self, c: ParamLike) -> bool:
        """Re-check the certificate against the recorded trajectory."""
        return self.certificate.verify(self.trajectory, as_param(c))

    def to_dict(self) -> dict:
        out: dict = {
            "kind": self.kind.value,
            "trajectory": [format_rational(x) for x in self.trajectory],
            "certificate": self.certificate.to_dict(),
        }
        if self.kind is not OrbitKind.WANDERING:
            out["tail"] = self.tail
            out["period"] = self.period
        return out


def padic_escape_prime(c: QuadParam, x: Fraction) -> int | None:
    """A prime ``p | den(c) den(x)`` with ``2 v_p(x) != v_p(c)``, if any exists.

    Such a prime forces v_p of the iterates to -infinity. None means ``x``
    has the denominator ``d`` every preperiodic point must have.
    """
    if c.d is not None and x.denominator == c.d:
        return None
    primes = supp(c.c.denominator) | supp(x.denominator)
    for p in sorted(primes):
        if 2 * v_p(x, p) != v_p(c.c, p):
            return p
    return None


def _padic(c: QuadParam, x: Fraction, index: int) -> PadicEscape | None:
    p = padic_escape_prime(c, x)
    if p is None:
        return None
    return PadicEscape(p, index, v_p(x, p), v_p(c.c, p))


def classify(c: ParamLike, x: RationalLike, max_iter: int = DEFAULT_MAX_ITER) -> OrbitResult:
    """Decide whether ``x`` is periodic, strictly preperiodic or wandering.

    Points failing the denominator test are wandering by a valuation
    certificate. Otherwise every iterate is ``X/d`` and the orbit is tracked
    on integer numerators until it repeats or leaves the escape radius.
    """
    c = as_param(c)
    x = as_rational(x)
    cert = _padic(c, x, 0)
    if cert is not None:
        return OrbitResult(OrbitKind.WANDERING, (x,), cert)

    d, a = c.d, c.a
    assert d is not None
    # |X| > d * beta  <=>  |x| > beta; compare X*2d against k*d with beta = k/(2d)
    beta = escape_bound(c)
    bound_num = beta.numerator * d
    bound_den = beta.denominator
    X = x.numerator
    nums = [X]
    seen = {X: 0}
    for step in range(max_iter):
        if abs(X) * bound_den > bound_num:
            traj = tuple(Fraction(v, d) for v in nums)
            return OrbitResult(OrbitKind.WANDERING, traj, ArchimedeanEscape(beta, step))
        Z, r = divmod(X * X - a, d)
        if r or math.gcd(Z, d) != 1:
            traj = tuple(Fraction(v, d) for v in nums) + (Fraction(X * X - a, d * d),)
            cert = _padic(c, traj[-1], step + 1)
            assert cert is not None
            return OrbitResult(OrbitKind.WANDERING, traj, cert)
        nums.append(Z)
        if Z in seen:
            i, j = seen[Z], step + 1
            traj = tuple(Fraction(v, d) for v in nums)
            kind = OrbitKind.PERIODIC if i == 0 else OrbitKind.PREPERIODIC
            return OrbitResult(kind, traj, Repeat(i, j), tail=i, period=j - i)
        seen[Z] = step + 1
        X = Z
    raise RuntimeError(f"classify hit the iteration cap {max_iter} for c={c}, x={x}")


def cycle_of(c: ParamLike, x: RationalLike, max_iter: int = DEFAULT_MAX_ITER) -> tuple[Fraction, ...]:
    res = classify(c, x, max_iter=max_iter)
    if res.kind is not OrbitKind.PERIODIC:
        raise ValueError(f"{format_rational(as_rational(x))} is not periodic (it is {res.kind.value})")
    return res.trajectory[: res.period]


def trajectory(c: ParamLike, x: RationalLike, steps: int) -> list[Fraction]:
    """The first ``steps + 1`` points of the forward orbit, no classification."""
    c = as_param(c)
    out = [as_rational(x)]
    for _ in range(steps):
        out.append(out[-1] ** 2 - c.c)
    return out
