import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadcycles.dynamics import phi
from quadcycles.solver import solve
from quadcycles.zieve import (
    BRUTE_LIMIT,
    PadicPoly,
    PrecisionError,
    allowed_periods,
    brute_periodic_points,
    conjugate_for_div16,
    e_range,
    lift_periodic_point,
    multiplier,
    parse_poly,
    period_mod,
    zieve_check,
)


def poly(text, p, precision=64):
    return parse_poly(text, p, precision)


# --- polynomials ----------------------------------------------------------------------


def test_parse_and_print():
    g = poly("t^2+t-1", 2)
    assert g.coefficients == (-1, 1, 1) and g.degree == 2
    assert str(g) == "t^2+t-1"
    assert parse_poly("3/2*x^2 - 5", 7).coefficients == (-5, 0, F(3, 2))
    assert str(parse_poly("-t^3 + 2t", 5)) == "-t^3+2*t"


@pytest.mark.parametrize("text, p", [("t+1", 2), ("t^2/", 2), ("1/2*t^2", 2), ("t^2+y", 3), ("", 3)])
def test_parse_rejects(text, p):
    with pytest.raises(ValueError):
        parse_poly(text, p)


def test_poly_rejects_composite_p():
    with pytest.raises(ValueError):
        PadicPoly((F(0), F(0), F(1)), 4)


def test_reduce_inverts_denominators():
    g = parse_poly("1/3*t^2", 2)
    assert g.reduce(3) == (0, 0, 3)  # 3 * 3 = 9 = 1 mod 8


# --- period and multiplier ------------------------------------------------------------


@pytest.mark.parametrize("text, p, alpha, period", [("t^2+t-1", 2, 1, 1), ("t^2", 3, 1, 1), ("t^2-1", 3, 0, 2)])
def test_period_mod_examples(text, p, alpha, period):
    assert period_mod(poly(text, p), alpha, 1) == period


def test_period_mod_not_periodic():
    with pytest.raises(ValueError, match="not periodic at this precision"):
        period_mod(poly("t^2", 3), 2, 1)


@pytest.mark.parametrize("text, p, alpha, m, mult", [("t^2+t-1", 2, 1, 1, 1), ("t^2", 3, 1, 1, 2), ("t^2-1", 3, 0, 2, 0)])
def test_multiplier_examples(text, p, alpha, m, mult):
    assert multiplier(poly(text, p), alpha, m) == mult


def test_e_range():
    assert e_range(2) == (1, 2)
    assert e_range(3) == (1,)
    assert e_range(5) == () and e_range(101) == ()


def test_e_range_against_inequality():
    for p in (2, 3, 5, 7, 11):
        expected = tuple(e for e in range(1, 10) if F(p ** (e - 1)) <= F(2, p - 1))
        assert e_range(p) == expected


def test_allowed_periods():
    assert allowed_periods(1, 1, 2) == (1, 2, 4)
    assert allowed_periods(1, 2, 3) == (1, 2, 6)
    assert allowed_periods(2, None, 3) == (2,)
    assert allowed_periods(3, 4, 5) == (3, 12)


@pytest.mark.parametrize(
    "text, p, alpha, n, m, mult, r, allowed",
    [
        ("t^2+t-1", 2, 1, 1, 1, 1, 1, (1, 2, 4)),
        ("t^2", 3, 1, 1, 1, 2, 2, (1, 2, 6)),
        ("t^2-1", 3, 0, 2, 2, 0, None, (2,)),
    ],
)
def test_zieve_check_examples(text, p, alpha, n, m, mult, r, allowed):
    data = zieve_check(poly(text, p), alpha, n)
    assert (data.m, data.multiplier, data.r, data.allowed) == (m, mult, r, allowed)
    assert data.consistent
    assert data.to_dict()["r"] == ("inf" if r is None else r)


def test_zieve_check_rejects_non_period():
    with pytest.raises(ValueError):
        zieve_check(poly("t^2-1", 3), 0, 3)


def test_zieve_check_precision_error_names_requirement():
    # t^2 + t + 1 over Z_2: the residue 1 has period 2 mod 4, period 4 mod 8, ...
    g = poly("t^2+t+1", 2, precision=2)
    assert period_mod(g, 1, 2) == 2
    assert period_mod(g, 1, 3) == 4 and period_mod(g, 1, 4) == 8
    # period 8 is a period mod 8 but not the exact one there
    with pytest.raises(PrecisionError, match="need precision >= 4"):
        zieve_check(g, 1, 8, precision=3)


def test_zieve_inconsistency_is_reported_not_raised():
    # mod 16 the residue 1 of t^2 + t + 1 has period 8, which no Z_2 point can have
    g = poly("t^2+t+1", 2, precision=4)
    assert period_mod(g, 1, 4) == 8
    data = zieve_check(g, 1, 8)
    assert not data.consistent and data.allowed == (1, 2, 4)


# --- brute force and lifting ---------------------------------------------------------


def test_brute_examples():
    assert brute_periodic_points(poly("t^2", 3), 1) == [(0, 1), (1, 1)]
    # 0 <-> 4 and the fixed point 3 (9 - 1 = 8 = 3 mod 5)
    assert brute_periodic_points(poly("t^2-1", 5), 1) == [(0, 2), (3, 1), (4, 2)]
    # scan mod 4 by hand: 0->3->3, 1->1, 2->1
    assert brute_periodic_points(poly("t^2+t-1", 2), 2) == [(1, 1), (3, 1)]


def test_brute_limit():
    with pytest.raises(ValueError):
        brute_periodic_points(poly("t^2", 2), 21)
    assert 2**20 > BRUTE_LIMIT


def _orbit_mod(g, x, k):
    ev = g.evaluator(k)
    seen = []
    while x not in seen:
        seen.append(x)
        x = ev(x)
    return seen, x


@pytest.mark.parametrize("text, p, k", [("t^2+t-1", 2, 3), ("t^2-2", 3, 2), ("2t^2+t+3", 5, 2), ("t^2+1", 2, 4)])
def test_brute_matches_naive_iteration(text, p, k):
    g = poly(text, p)
    expected = []
    for x in range(p**k):
        path, back = _orbit_mod(g, x, k)
        if back == x:
            expected.append((x, len(path)))
    assert brute_periodic_points(g, k) == expected


def test_lift_certifies_genuine_points():
    g = poly("t^2+t-1", 2)
    # t^2 + t - 1 fixes t = +-1 exactly
    assert lift_periodic_point(g, 1, 1, 1) == 1
    assert lift_periodic_point(g, 3, 1, 2) == (-1) % 2**64
    # no Z_2 point of t^2 + t + 1 is periodic
    h = poly("t^2+t+1", 2)
    assert all(lift_periodic_point(h, a, n, 4) is None for a, n in brute_periodic_points(h, 4))


def test_lift_finds_irrational_root():
    # the fixed points of t^2 - 1 are (1 +- sqrt 5)/2, and 5 = 4^2 is a square mod 11
    g = poly("t^2-1", 11)
    fixed = [a for a, n in brute_periodic_points(g, 1) if n == 1]
    assert fixed == [4, 8]
    mod = 11**64
    for a in fixed:
        r = lift_periodic_point(g, a, 1, 1)
        assert r % 11 == a
        assert (r * r - r - 1) % mod == 0


@given(st.integers(-6, 6), st.integers(-6, 6), st.sampled_from([2, 3, 5]), st.integers(1, 4))
@settings(max_examples=120, deadline=None)
def test_mod_p_period_divides_higher_periods(b, c0, p, k):
    g = PadicPoly((F(c0), F(b), F(1)), p)
    for alpha, n in brute_periodic_points(g, k):
        m = period_mod(g, alpha, 1)
        for j in range(1, k + 1):
            assert period_mod(g, alpha, j) % m == 0
        assert n == period_mod(g, alpha, k)


@given(st.integers(-6, 6), st.integers(-6, 6), st.sampled_from([2, 3, 5]), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_lifted_points_are_consistent(b, c0, p, k):
    g = PadicPoly((F(c0), F(b), F(1)), p, precision=24)
    for alpha, n in brute_periodic_points(g, k):
        root = lift_periodic_point(g, alpha, n, k)
        if root is not None:
            assert zieve_check(g, root, n).consistent


# --- the div-16 conjugation -----------------------------------------------------------


def test_conjugation_examples():
    conj = conjugate_for_div16("3/4")
    assert conj.accepted and str(conj.poly) == "t^2+t-1" and conj.constant == 1
    # fixed points -1/2 and 3/2 of x^2 - 3/4 become t = -1 and t = 1
    assert sorted(conj.translate(x) for x in solve("3/4").per) == [-1, 1]
    assert all(conj.f(conj.translate(x)) == conj.translate(x) for x in solve("3/4").per)

    rej = conjugate_for_div16("5/4")
    assert not rej.accepted and rej.constant == F(3, 2)
    assert "v_2(c + 1/4) = -1" in rej.reason
    assert solve("5/4").per == ()

    with pytest.raises(ValueError):
        conjugate_for_div16("29/16")


def test_step_two_configuration():
    conj = conjugate_for_div16("3/4")
    data = zieve_check(conj.poly, 1, 1)
    assert (data.p, data.m, data.r) == (2, 1, 1)
    assert data.allowed == (1, 2, 4)


@given(st.integers(-500, 500).filter(lambda a: a % 2), st.fractions(max_denominator=50))
def test_conjugation_identity(a, t):
    c = F(a, 4)
    conj = conjugate_for_div16(c)
    assert conj.f(t - F(1, 2)) == phi(c, t) - F(1, 2)
    assert conj.untranslate(conj.translate(t)) == t
