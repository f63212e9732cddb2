"""Period classification of p-adic periodic points, carried out modulo p**K.

For ``g`` in Z_p[t] of degree >= 2 and a periodic point ``alpha`` of exact
period ``n``, let ``m`` be the period of ``alpha`` mod p and ``r`` the
multiplicative order of ``(g^m)'(alpha)`` mod p (infinite when that
multiplier vanishes mod p). Then ``n`` is ``m``, ``m*r`` or ``m*r*p**e`` with
``e >= 1`` and ``p**(e-1) <= 2/(p-1)``. This module computes all of these
quantities at an explicit precision and checks the membership.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .numbers import RationalLike, as_rational, format_rational, is_prime, multiplicative_order, v_p

log = logging.getLogger(__name__)

DEFAULT_PRECISION = 64
BRUTE_LIMIT = 10**6

Residue = Union[int, Fraction]


class PrecisionError(ValueError):
    """The working precision cannot certify the claimed period."""


@dataclass(frozen=True)
class PadicPoly:
    """Polynomial with p-integral rational coefficients, lowest degree first."""

    coefficients: tuple[Fraction, ...]
    p: int
    precision: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        coeffs = tuple(as_rational(a) for a in self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.precision < 1:
            raise ValueError("precision must be at least 1")
        if len(coeffs) < 3:
            raise ValueError("degree must be at least 2")
        for a in coeffs:
            if a.denominator % self.p == 0:
                raise ValueError(f"coefficient {format_rational(a)} is not {self.p}-integral")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def reduce(self, k: int) -> tuple[int, ...]:
        """Integer coefficients mod ``p**k``."""
        mod = self.p**k
        return tuple(a.numerator * pow(a.denominator, -1, mod) % mod for a in self.coefficients)

    def derivative_coefficients(self, k: int) -> tuple[int, ...]:
        mod = self.p**k
        red = self.reduce(k)
        return tuple(i * red[i] % mod for i in range(1, len(red)))

    def evaluator(self, k: int) -> "_ModEval":
        return _ModEval(self.reduce(k), self.derivative_coefficients(k), self.p**k)

    def __str__(self) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            a = self.coefficients[i]
            if a == 0:
                continue
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{format_rational(mag)}*{mono}"
            else:
                body = format_rational(mag)
            terms.append((sign, body))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f"{s}{b}" for s, b in terms[1:])


class _ModEval:
    __slots__ = ("coeffs", "dcoeffs", "mod")

    def __init__(self, coeffs: Sequence[int], dcoeffs: Sequence[int], mod: int) -> None:
        self.coeffs = coeffs
        self.dcoeffs = dcoeffs
        self.mod = mod

    def __call__(self, x: int) -> int:
        acc = 0
        for a in reversed(self.coeffs):
            acc = (acc * x + a) % self.mod
        return acc

    def deriv(self, x: int) -> int:
        acc = 0
        for a in reversed(self.dcoeffs):
            acc = (acc * x + a) % self.mod
        return acc


_TERM_RE = re.compile(r"^(\d+(?:/\d+)?)?\*?([tx](?:\^(\d+))?)?$")


def parse_poly(text: str, p: int, precision: int = DEFAULT_PRECISION) -> PadicPoly:
    """Parse e.g. ``"t^2+t-1"`` or ``"3/2*t^2 - 5"`` into a :class:`PadicPoly`."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    coeffs: dict[int, Fraction] = {}
    for sign, body in re.findall(r"([+-])([^+-]+)", s):
        m = _TERM_RE.match(body)
        if m is None or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"cannot parse term {body!r} in {text!r}")
        coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        if m.group(2) is None:
            deg = 0
        else:
            deg = int(m.group(3)) if m.group(3) else 1
        coeffs[deg] = coeffs.get(deg, Fraction(0)) + (coef if sign == "+" else -coef)
    if "".join(sign + body for sign, body in re.findall(r"([+-])([^+-]+)", s)) != s:
        raise ValueError(f"cannot parse {text!r}")
    top = max(coeffs)
    return PadicPoly(tuple(coeffs.get(i, Fraction(0)) for i in range(top + 1)), p, precision)


def _residue(alpha: Residue, p: int, k: int) -> int:
    mod = p**k
    if isinstance(alpha, int):
        return alpha % mod
    a = as_rational(alpha)
    if a.denominator % p == 0:
        raise ValueError(f"{format_rational(a)} is not {p}-integral")
    return a.numerator * pow(a.denominator, -1, mod) % mod


def period_mod(g: PadicPoly, alpha: Residue, k: int) -> int:
    """Least ``n >= 1`` with ``g^n(alpha) = alpha`` mod ``p**k``."""
    ev = g.evaluator(k)
    a0 = _residue(alpha, g.p, k)
    x = a0
    for n in range(1, ev.mod + 1):
        x = ev(x)
        if x == a0:
            return n
    raise ValueError(f"not periodic at this precision (p^{k})")


def multiplier(g: PadicPoly, alpha: Residue, m: int) -> int:
    """``(g^m)'(alpha)`` mod p, as the product of ``g'`` along the orbit."""
    ev = g.evaluator(1)
    x = _residue(alpha, g.p, 1)
    out = 1
    for _ in range(m):
        out = out * ev.deriv(x) % g.p
        x = ev(x)
    return out


def e_range(p: int) -> tuple[int, ...]:
    """The exponents ``e >= 1`` with ``p**(e-1) * (p-1) <= 2``."""
    out = []
    e = 1
    while p ** (e - 1) * (p - 1) <= 2:
        out.append(e)
        e += 1
    return tuple(out)


def allowed_periods(m: int, r: int | None, p: int) -> tuple[int, ...]:
    """``{m, m*r} + {m*r*p**e}``; only ``{m}`` when ``r`` is infinite (None)."""
    out = {m}
    if r is not None:
        out.add(m * r)
        out.update(m * r * p**e for e in e_range(p))
    return tuple(sorted(out))


@dataclass(frozen=True)
class ZieveData:
    alpha: int
    p: int
    n: int
    m: int
    multiplier: int
    r: int | None
    allowed: tuple[int, ...]
    consistent: bool
    precision: int

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "p": self.p,
            "n": self.n,
            "m": self.m,
            "multiplier": self.multiplier,
            "r": "inf" if self.r is None else self.r,
            "allowed": list(self.allowed),
            "consistent": self.consistent,
            "precision": self.precision,
        }


def zieve_check(g: PadicPoly, alpha: Residue, n: int, precision: int | None = None) -> ZieveData:
    """Compute ``m``, ``r`` and the allowed periods for ``alpha`` and test ``n`` against them.

    ``n`` must be the exact period of ``alpha`` modulo ``p**precision``.
    Integer or rational ``alpha`` is taken as exact, so when the precision is
    too coarse to see period ``n`` the error names a precision that does.
    """
    K = precision or g.precision
    a = _residue(alpha, g.p, K)
    ev = g.evaluator(K)
    x = a
    for _ in range(n):
        x = ev(x)
    if x != a:
        raise ValueError(f"{n} is not a period of alpha modulo {g.p}^{K}")
    seen = period_mod(g, a, K)
    if seen != n:
        need = None
        for k in range(K + 1, 8 * K + 1):
            if period_mod(g, alpha, k) == n:
                need = k
                break
        hint = f"need precision >= {need}" if need else f"not reached by precision {8 * K}"
        raise PrecisionError(f"period at precision {K} is {seen}, not {n}; {hint}")
    m = period_mod(g, a, 1)
    mult = multiplier(g, a, m)
    r = multiplicative_order(mult, g.p) if mult % g.p else None
    allowed = allowed_periods(m, r, g.p)
    ok = n in allowed
    if not ok:
        log.error("period %d outside allowed %s for alpha=%d, g=%s, p=%d", n, allowed, a, g, g.p)
    return ZieveData(a, g.p, n, m, mult, r, allowed, ok, K)


def brute_periodic_points(g: PadicPoly, k: int) -> list[tuple[int, int]]:
    """Every periodic residue mod ``p**k`` with its period, sorted by residue."""
    mod = g.p**k
    if mod > BRUTE_LIMIT:
        raise ValueError(f"p^k = {mod} exceeds the brute-force limit {BRUTE_LIMIT}")
    ev = g.evaluator(k)
    img = [ev(x) for x in range(mod)]
    state = [0] * mod  # 0 unseen, 1 on current path, 2 done
    out: list[tuple[int, int]] = []
    for start in range(mod):
        if state[start]:
            continue
        path = []
        x = start
        while state[x] == 0:
            state[x] = 1
            path.append(x)
            x = img[x]
        if state[x] == 1:
            cyc = path[path.index(x) :]
            out.extend((y, len(cyc)) for y in cyc)
        for y in path:
            state[y] = 2
    out.sort()
    return out


def _val(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    e = 0
    while x % p == 0 and e < cap:
        x //= p
        e += 1
    return e


def _iter_and_deriv(ev: _ModEval, x: int, n: int) -> tuple[int, int]:
    """``g^n(x) - x`` and ``(g^n)'(x) - 1`` modulo ``ev.mod``."""
    y, der = x, 1
    for _ in range(n):
        der = der * ev.deriv(y) % ev.mod
        y = ev(y)
    return (y - x) % ev.mod, (der - 1) % ev.mod


def lift_periodic_point(
    g: PadicPoly, alpha: int, n: int, k: int, precision: int | None = None, max_level: int | None = None
) -> int | None:
    """Residue mod ``p**precision`` of a genuine Z_p point of exact period ``n`` lying over ``alpha``.

    ``alpha`` is a residue mod ``p**k`` of period ``n``. Lifts are searched
    digit by digit until Hensel's criterion ``v(h) > 2 v(h')`` holds for
    ``h = g^n(t) - t``, then refined by Newton steps. None when no lift is
    certified within ``max_level`` digits (no root, or a degenerate one).
    """
    p = g.p
    K = precision or g.precision
    max_level = max_level or 2 * K
    W = 3 * K + 8
    ev = g.evaluator(W)
    level, cands = k, [alpha % p**k]
    while cands and level <= max_level:
        for beta in cands:
            hv, dv = _iter_and_deriv(ev, beta, n)
            vh, vd = _val(hv, p, W), _val(dv, p, W)
            if vd < W and vh > 2 * vd and K + 2 * vd + 2 <= W:
                root = _newton(ev, beta, n, p, vd, K)
                if root is not None and root % p**k == alpha % p**k and period_mod(g, root, K) == n:
                    return root % p**K
        nxt_mod = p ** (level + 1)
        step = p**level
        cands = [
            b + t * step
            for b in cands
            for t in range(p)
            if _iter_and_deriv(ev, b + t * step, n)[0] % nxt_mod == 0
        ]
        if len(cands) > 4096:
            return None
        level += 1
    return None


def _newton(ev: _ModEval, x: int, n: int, p: int, vd: int, K: int) -> int | None:
    target = K + vd
    for _ in range(200):
        hv, dv = _iter_and_deriv(ev, x, n)
        if hv % p**target == 0:
            return x % p**K
        if _val(dv, p, target) != vd:
            return None
        unit = (dv // p**vd) % ev.mod
        x = (x - (hv // p**vd) * pow(unit, -1, ev.mod)) % ev.mod
    return None


# --- the conjugation used to force 16 | den(c) --------------------------------


@dataclass(frozen=True)
class Div16Conjugation:
    """``f(t) = t^2 + t - (c + 1/4)``, conjugate to x^2 - c by ``t = x - 1/2``.

    ``poly`` is set when the constant term is 2-integral. Otherwise the
    conjugation is rejected: no cycle with denominator d can exist.
    """

    c: Fraction
    constant: Fraction
    poly: PadicPoly | None
    reason: str | None = None

    @property
    def accepted(self) -> bool:
        return self.poly is not None

    @staticmethod
    def translate(x: RationalLike) -> Fraction:
        return as_rational(x) - Fraction(1, 2)

    @staticmethod
    def untranslate(t: RationalLike) -> Fraction:
        return as_rational(t) + Fraction(1, 2)

    def f(self, t: RationalLike) -> Fraction:
        t = as_rational(t)
        return t * t + t - self.constant


def conjugate_for_div16(c: RationalLike, precision: int = DEFAULT_PRECISION) -> Div16Conjugation:
    c = as_rational(c)
    if v_p(c, 2) != -2:
        raise ValueError(f"needs v_2(c) = -2, got {v_p(c, 2)} for c={format_rational(c)}")
    const = c + Fraction(1, 4)
    if const != 0 and v_p(const, 2) < 0:
        return Div16Conjugation(c, const, None, f"v_2(c + 1/4) = {v_p(const, 2)} < 0")
    poly = PadicPoly((-const, Fraction(1), Fraction(1)), 2, precision)
    return Div16Conjugation(c, const, poly)
