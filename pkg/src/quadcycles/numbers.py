"""Exact rational arithmetic and the elementary number theory used everywhere else.

Rationals are :class:`fractions.Fraction` values, which are always reduced
with a positive denominator, so ``num``/``den`` are plain attribute reads.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

# v_p(0); compares correctly against every int.
INFINITY = math.inf

TRIAL_DIVISION_LIMIT = 1 << 20

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or ``"a"`` (optional sign) into a reduced Fraction."""
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def as_rational(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def num(x: Fraction) -> int:
    return x.numerator


def den(x: Fraction) -> int:
    return x.denominator


# --- primality and factorization ---------------------------------------------

@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    limit = TRIAL_DIVISION_LIMIT
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i, flag in enumerate(sieve) if flag)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Miller-Rabin with the first 13 prime bases.

    Deterministic below 3.3e24, and a strong probable-prime test above that.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    """Prime powers ``(p, e)`` in ascending order of ``p``."""

    prime_powers: tuple[tuple[int, int], ...]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.prime_powers)

    def __len__(self) -> int:
        return len(self.prime_powers)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.prime_powers)

    @property
    def value(self) -> int:
        out = 1
        for p, e in self.prime_powers:
            out *= p**e
        return out

    def exponent(self, p: int) -> int:
        for q, e in self.prime_powers:
            if q == p:
                return e
        return 0


def factor(n: int, seed: int = 0) -> Factorization:
    """Complete prime factorization of ``n >= 1``.

    Trial division by primes below 2**20, then Pollard-Brent seeded with
    ``seed`` on whatever composite cofactor is left, so results (and the
    work done) are reproducible.
    """
    if n < 1:
        raise ValueError(f"factor expects a positive integer, got {n}")
    counts: dict[int, int] = {}
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            counts[p] = e
    if n > 1:
        rng = random.Random(seed)
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if is_prime(m):
                counts[m] = counts.get(m, 0) + 1
                continue
            # cofactor has no prime below the trial-division bound, so it is odd
            f = _pollard_brent(m, rng)
            stack.extend((f, m // f))
    return Factorization(tuple(sorted(counts.items())))


def supp(d: int) -> frozenset[int]:
    """The set of primes dividing ``d``; the sign of ``d`` is ignored."""
    if d == 0:
        raise ValueError("supp is undefined for 0")
    return frozenset(factor(abs(d)).primes)


def v_p(x: RationalLike, p: int) -> int | float:
    """p-adic valuation of ``x``; :data:`INFINITY` for zero."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    x = as_rational(x)
    if x == 0:
        return INFINITY
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def _vp_int(n: int, p: int) -> int:
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def integer_sqrt(n: int) -> tuple[int, bool]:
    """Return ``(floor(sqrt(n)), n is a perfect square)``."""
    if n < 0:
        raise ValueError("integer_sqrt of a negative number")
    r = math.isqrt(n)
    return r, r * r == n


def rational_sqrt(x: Fraction) -> Fraction | None:
    """The nonnegative rational square root of ``x``, or None if there is none."""
    if x < 0:
        return None
    rn, exact_n = integer_sqrt(x.numerator)
    rd, exact_d = integer_sqrt(x.denominator)
    if exact_n and exact_d:
        return Fraction(rn, rd)
    return None


def crt_combine(residues: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Solve ``x = r_i mod m_i`` for pairwise coprime moduli.

    Returns ``(x, M)`` with ``0 <= x < M`` and ``M`` the product of moduli.
    """
    x, modulus = 0, 1
    for r, m in residues:
        if m < 1:
            raise ValueError(f"modulus must be positive, got {m}")
        if math.gcd(modulus, m) != 1:
            raise ValueError(f"moduli not pairwise coprime at {m}")
        # x + modulus * t = r (mod m)
        t = (r - x) * pow(modulus, -1, m) % m
        x += modulus * t
        modulus *= m
    return x % modulus, modulus


def sqrt_mod_prime_power(a: int, p: int, e: int) -> list[int]:
    """All residues ``X`` mod ``p**e`` with ``X**2 = a`` (mod ``p**e``).

    Roots are lifted one digit at a time, which covers p = 2 and the
    degenerate (p | a) cases without special handling.
    """
    roots = [x for x in range(p) if (x * x - a) % p == 0]
    pk = p
    for _ in range(1, e):
        nxt = pk * p
        roots = [r + t * pk for r in roots for t in range(p) if ((r + t * pk) ** 2 - a) % nxt == 0]
        pk = nxt
    return sorted(roots)


def sqrt_mod(a: int, fac: Factorization) -> list[int]:
    """All square roots of ``a`` modulo the integer whose factorization is ``fac``."""
    per_prime = [(sqrt_mod_prime_power(a, p, e), p**e) for p, e in fac]
    combos: list[tuple[int, int]] = [(0, 1)]
    for roots, m in per_prime:
        combos = [crt_combine([(x, mod), (r, m)]) for x, mod in combos for r in roots]
    return sorted(x for x, _ in combos)


def lcm(*values: int) -> int:
    return reduce(lambda u, v: u * v // math.gcd(u, v), values, 1)


def multiplicative_order(u: int, n: int) -> int:
    """Order of ``u`` in the unit group mod ``n``."""
    u %= n
    if math.gcd(u, n) != 1:
        raise ValueError(f"{u} is not a unit mod {n}")
    k, x = 1, u
    while x != 1 % n:
        x = x * u % n
        k += 1
    return k
