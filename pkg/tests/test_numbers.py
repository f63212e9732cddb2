import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadcycles.numbers import (
    INFINITY,
    Factorization,
    crt_combine,
    factor,
    format_rational,
    integer_sqrt,
    is_prime,
    multiplicative_order,
    parse_rational,
    rational_sqrt,
    sqrt_mod,
    sqrt_mod_prime_power,
    supp,
    v_p,
)

primes = st.sampled_from([2, 3, 5, 7, 11, 13, 101])
nonzero_rationals = st.fractions(max_denominator=10**6).filter(lambda q: q != 0)


def _trial_prime(n):
    return n >= 2 and all(n % k for k in range(2, math.isqrt(n) + 1))


# --- valuations -----------------------------------------------------------------


def test_v_p_examples():
    assert v_p(Fraction(29, 16), 2) == -4
    assert v_p(45, 3) == 2
    assert v_p(0, 5) == INFINITY


def test_v_p_rejects_composite():
    with pytest.raises(ValueError):
        v_p(12, 4)


@given(nonzero_rationals, nonzero_rationals, primes)
def test_v_p_multiplicative(x, y, p):
    assert v_p(x * y, p) == v_p(x, p) + v_p(y, p)


@given(nonzero_rationals, nonzero_rationals, primes)
def test_v_p_ultrametric(x, y, p):
    vx, vy = v_p(x, p), v_p(y, p)
    assert v_p(x + y, p) >= min(vx, vy)
    if vx != vy:
        assert v_p(x + y, p) == min(vx, vy)


# --- supp and factor --------------------------------------------------------------


@pytest.mark.parametrize("d, expected", [(45, {3, 5}), (1, set()), (-16, {2})])
def test_supp(d, expected):
    assert supp(d) == expected


def test_supp_zero():
    with pytest.raises(ValueError):
        supp(0)


@pytest.mark.parametrize(
    "n, expected",
    [(1, ()), (16, ((2, 4),)), (144, ((2, 4), (3, 2))), (10**9 + 7, ((10**9 + 7, 1),))],
)
def test_factor_examples(n, expected):
    assert factor(n).prime_powers == expected


def test_billion_plus_seven_is_prime_by_trial_division():
    assert _trial_prime(10**9 + 7)


def test_factor_rejects_nonpositive():
    with pytest.raises(ValueError):
        factor(0)


def test_factor_roundtrip_exhaustive_to_a_million():
    # smallest-prime-factor sieve as the independent reference
    N = 10**6
    spf = list(range(N + 1))
    for i in range(2, math.isqrt(N) + 1):
        if spf[i] == i:
            for j in range(i * i, N + 1, i):
                if spf[j] == j:
                    spf[j] = i
    for n in range(1, N + 1):
        fac = factor(n)
        assert fac.value == n
        m, ref = n, {}
        while m > 1:
            ref[spf[m]] = ref.get(spf[m], 0) + 1
            m //= spf[m]
        assert dict(fac.prime_powers) == ref


def test_factor_roundtrip_random_64_bit():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.getrandbits(64) | 1
        fac = factor(n)
        assert fac.value == n
        assert all(is_prime(p) for p in fac.primes)
        assert list(fac.primes) == sorted(set(fac.primes))


def test_factor_semiprime_of_large_primes_uses_rho():
    p, q = 1_000_000_007, 998_244_353
    assert factor(p * q).prime_powers == ((q, 1), (p, 1))
    # deterministic for a fixed seed
    assert factor(p * q * 3, seed=5) == factor(p * q * 3, seed=5)


def test_is_prime_matches_trial_division():
    assert [n for n in range(2000) if is_prime(n)] == [n for n in range(2000) if _trial_prime(n)]


def test_factorization_helpers():
    fac = Factorization(((2, 4), (3, 2)))
    assert fac.value == 144
    assert fac.exponent(3) == 2 and fac.exponent(5) == 0
    assert len(fac) == 2


# --- square roots -----------------------------------------------------------------


@pytest.mark.parametrize("n, expected", [(16, (4, True)), (17, (4, False)), (29 * 29, (29, True))])
def test_integer_sqrt_examples(n, expected):
    assert integer_sqrt(n) == expected


def test_integer_sqrt_negative():
    with pytest.raises(ValueError):
        integer_sqrt(-1)


@given(st.integers(min_value=0, max_value=10**40))
def test_integer_sqrt_brackets(n):
    r, exact = integer_sqrt(n)
    assert r * r <= n < (r + 1) ** 2
    assert exact == (r * r == n)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(25, 16)) == Fraction(5, 4)
    assert rational_sqrt(Fraction(41, 16)) is None
    assert rational_sqrt(Fraction(-1)) is None


@pytest.mark.parametrize("a, p, e", [(29, 2, 2), (1, 2, 4), (5, 2, 3), (4, 3, 2), (0, 3, 3), (7, 5, 2), (9, 3, 3)])
def test_sqrt_mod_prime_power_matches_scan(a, p, e):
    m = p**e
    assert sqrt_mod_prime_power(a, p, e) == [x for x in range(m) if (x * x - a) % m == 0]


@pytest.mark.parametrize("a, d", [(29, 4), (1, 144), (13, 36), (-7, 12), (1, 1), (61, 60)])
def test_sqrt_mod_matches_scan(a, d):
    assert sqrt_mod(a, factor(d)) == [x for x in range(d) if (x * x - a) % d == 0]


# --- CRT --------------------------------------------------------------------------


def test_crt_examples():
    assert crt_combine([(1, 4), (2, 3)]) == (5, 12)
    assert crt_combine([(3, 4), (1, 3)]) == (7, 12)
    scan = [x for x in range(144) if x % 16 == 1 and x % 9 == 2]
    assert scan == [65]
    assert crt_combine([(1, 16), (2, 9)]) == (65, 144)


def test_crt_rejects_shared_factor():
    with pytest.raises(ValueError):
        crt_combine([(1, 4), (1, 6)])


@given(st.lists(st.tuples(st.integers(-1000, 1000), st.sampled_from([4, 9, 25, 7, 11, 13, 1])), max_size=4))
@settings(max_examples=200)
def test_crt_reduces_to_inputs(items):
    moduli = []
    for _, m in items:
        if any(math.gcd(m, k) != 1 for k in moduli):
            return
        moduli.append(m)
    x, M = crt_combine(items)
    assert M == math.prod(moduli)
    for r, m in items:
        assert (x - r) % m == 0


# --- parsing ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, value",
    [("29/16", Fraction(29, 16)), ("-7/5", Fraction(-7, 5)), ("3", Fraction(3)), ("+4/8", Fraction(1, 2)), (" -0 ", Fraction(0))],
)
def test_parse_rational(text, value):
    q = parse_rational(text)
    assert q == value
    assert math.gcd(q.numerator, q.denominator) == 1 and q.denominator >= 1


@pytest.mark.parametrize("text", ["", "1/0", "a/b", "1.5", "1//2", "--3"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


@given(st.fractions(max_denominator=10**9))
def test_format_parse_roundtrip(q):
    assert parse_rational(format_rational(q)) == q


def test_multiplicative_order():
    assert multiplicative_order(2, 3) == 2
    assert multiplicative_order(1, 2) == 1
    assert multiplicative_order(2, 5) == 4
    with pytest.raises(ValueError):
        multiplicative_order(0, 5)
