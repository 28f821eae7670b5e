"""Tests for the exact rational/interval arithmetic layer."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conecert.exact import (
    AngleDeg,
    DegenerateQuadraticError,
    Interval,
    SingularAngleError,
    SurdValue,
    angle_range_from_threshold,
    cos2_over_sin4,
    pi_interval,
    quadratic_real_roots,
    sqrt_fraction_enclosure,
    threshold_to_cos_squared,
    to_fraction,
)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)
positive_rationals = st.fractions(min_value=Fraction(1, 10**6), max_value=1000, max_denominator=10**6)
nonneg_rationals = st.fractions(min_value=0, max_value=1000, max_denominator=10**6)


# ---------------------------------------------------------------------------
# to_fraction
# ---------------------------------------------------------------------------


def test_to_fraction_accepts_int_fraction_string():
    assert to_fraction(3) == Fraction(3)
    assert to_fraction(Fraction(6, 11)) == Fraction(6, 11)
    assert to_fraction("43/391") == Fraction(43, 391)
    assert to_fraction(" 1/1000 ") == Fraction(1, 1000)


def test_to_fraction_rejects_floats():
    with pytest.raises(TypeError):
        to_fraction(0.1)
    with pytest.raises(TypeError):
        to_fraction(None)


# ---------------------------------------------------------------------------
# Interval
# ---------------------------------------------------------------------------


def test_interval_rejects_inverted_endpoints():
    with pytest.raises(ValueError):
        Interval(Fraction(1), Fraction(0))


def test_interval_division_by_zero_containing_interval():
    num = Interval.point(Fraction(1))
    with pytest.raises(ZeroDivisionError):
        num / Interval(Fraction(-1), Fraction(1))


@given(rationals, rationals, rationals, rationals)
def test_interval_arithmetic_contains_pointwise_results(a, b, c, d):
    ia = Interval(min(a, b), max(a, b))
    ic = Interval(min(c, d), max(c, d))
    # Any representatives of the operand intervals must land inside the
    # result interval; the endpoints themselves are the extreme choices.
    for x in (ia.lo, ia.hi):
        for y in (ic.lo, ic.hi):
            assert (ia + ic).contains(x + y)
            assert (ia - ic).contains(x - y)
            assert (ia * ic).contains(x * y)
            assert ia.square().contains(x * x)


@given(rationals, rationals)
def test_interval_square_is_nonnegative(a, b):
    iv = Interval(min(a, b), max(a, b)).square()
    assert iv.lo >= 0


@given(nonneg_rationals)
def test_sqrt_enclosure_soundness(x):
    enc = sqrt_fraction_enclosure(x)
    assert enc.lo >= 0
    assert enc.lo * enc.lo <= x <= enc.hi * enc.hi
    # Outward rounding is tight: the endpoints sit on a fine grid.
    assert enc.width <= Fraction(1, 10**12)


def test_sqrt_enclosure_exact_for_perfect_squares():
    enc = sqrt_fraction_enclosure(Fraction(9, 4))
    assert enc.lo == enc.hi == Fraction(3, 2)


@given(nonneg_rationals, nonneg_rationals)
def test_interval_sqrt_soundness(a, b):
    iv = Interval(min(a, b), max(a, b))
    root = iv.sqrt()
    assert root.lo * root.lo <= iv.lo
    assert root.hi * root.hi >= iv.hi


def test_interval_hull_intersect_clamp():
    a = Interval(Fraction(0), Fraction(2))
    b = Interval(Fraction(1), Fraction(3))
    assert Interval.hull([a, b]) == Interval(Fraction(0), Fraction(3))
    assert a.intersect(b) == Interval(Fraction(1), Fraction(2))
    assert a.clamp(Fraction(1), Fraction(10)) == Interval(Fraction(1), Fraction(2))
    assert a.overlaps(b)
    assert not a.overlaps(Interval(Fraction(5), Fraction(6)))
    with pytest.raises(ValueError):
        a.intersect(Interval(Fraction(5), Fraction(6)))


def test_pi_enclosure_is_tight_and_correct():
    pi = pi_interval()
    assert pi.strictly_positive()
    assert pi.contains_float(math.pi)
    # 192-bit working precision leaves an enclosure far finer than any
    # tolerance used downstream.
    assert pi.width < Fraction(1, 10**50)
    assert Fraction(355, 113) > pi.hi > pi.lo > Fraction(22, 7) - Fraction(1, 100)


# ---------------------------------------------------------------------------
# SurdValue
# ---------------------------------------------------------------------------


@given(nonneg_rationals)
@settings(max_examples=50, deadline=None)
def test_surd_from_square_roundtrip(x):
    v = SurdValue.from_square(x)
    assert v.square() == x
    assert isinstance(v.radicand, int)  # stays a plain int even with gmpy2 installed
    # The certified enclosure must bracket the true root exactly:
    # lo^2 <= x <= hi^2 (both endpoints are non-negative here).
    iv = v.to_interval()
    assert 0 <= iv.lo and iv.lo * iv.lo <= x <= iv.hi * iv.hi


def test_surd_known_forms():
    assert SurdValue.from_square(Fraction(1, 6)) == SurdValue(Fraction(1, 6), 6)
    assert SurdValue.from_square(Fraction(4225, 7986)) == SurdValue(Fraction(65, 726), 66)
    assert SurdValue.from_square(Fraction(646328929, 717317652)) == SurdValue(
        Fraction(25423, 917286), 1173
    )
    assert SurdValue.from_square(Fraction(0)) == SurdValue(Fraction(0), 0)
    assert SurdValue.from_square(Fraction(49, 25)) == SurdValue(Fraction(7, 5), 1)


def test_surd_rejects_negative_square():
    with pytest.raises(ValueError):
        SurdValue.from_square(Fraction(-1, 2))


# ---------------------------------------------------------------------------
# AngleDeg
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "deg,cos_exact",
    [
        (0, Fraction(1)),
        (60, Fraction(1, 2)),
        (90, Fraction(0)),
        (120, Fraction(-1, 2)),
        (180, Fraction(-1)),
    ],
)
def test_special_angles_are_exact(deg, cos_exact):
    theta = AngleDeg.from_degrees(deg)
    c = theta.cos()
    assert c.lo == c.hi == cos_exact
    s2 = theta.sin_squared()
    assert s2.lo == s2.hi == 1 - cos_exact * cos_exact


def test_generic_angle_enclosures_are_sound():
    theta = AngleDeg.from_degrees(Fraction(100))
    c, s = theta.cos(), theta.sin()
    # The enclosures are far tighter than a float ulp, so compare midpoints
    # to the float library within float accuracy.
    assert abs(float(c) - math.cos(math.radians(100))) < 1e-15
    assert abs(float(s) - math.sin(math.radians(100))) < 1e-15
    assert c.width < Fraction(1, 10**40)
    assert s.width < Fraction(1, 10**40)


@given(st.fractions(min_value=Fraction(1), max_value=Fraction(179), max_denominator=720))
@settings(max_examples=40, deadline=None)
def test_supplement_mirrors_cosine(deg):
    theta = AngleDeg.from_degrees(deg)
    supp = theta.supplement()
    assert supp.value.lo == 180 - deg
    # cos(180 - x) = -cos(x): the enclosures must mirror within rounding.
    mirrored = theta.cos() * Interval.point(Fraction(-1))
    assert supp.cos().overlaps(mirrored)
    assert supp.sin().overlaps(theta.sin())


# ---------------------------------------------------------------------------
# Quadratic roots
# ---------------------------------------------------------------------------


@given(rationals, rationals, st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=1000))
@settings(max_examples=60, deadline=None)
def test_quadratic_roots_from_constructed_factors(r1, r2, lead):
    # a (x - r1)(x - r2) has exactly the roots {r1, r2}.
    a = lead
    b = -lead * (r1 + r2)
    c = lead * r1 * r2
    roots = quadratic_real_roots(a, b, c)
    expected = sorted({r1, r2})
    assert len(roots) == len(expected)
    for root, want in zip(roots, expected):
        assert root.exact
        assert root.interval.lo == root.interval.hi == want


def test_quadratic_irrational_roots_enclosed():
    roots = quadratic_real_roots(1, 0, -2)  # x^2 = 2
    assert len(roots) == 2
    lo, hi = roots
    assert not lo.exact and not hi.exact
    assert hi.interval.contains_float(math.sqrt(2))
    assert lo.interval.contains_float(-math.sqrt(2))
    assert hi.interval.width <= Fraction(1, 10**12)
    assert lo.interval.hi < hi.interval.lo  # returned in ascending order


def test_quadratic_no_real_roots_and_degenerate():
    assert quadratic_real_roots(1, 0, 1) == []
    double = quadratic_real_roots(1, -2, 1)
    assert len(double) == 1 and double[0].exact and double[0].interval.lo == 1
    with pytest.raises(DegenerateQuadraticError):
        quadratic_real_roots(0, 1, 1)


# ---------------------------------------------------------------------------
# Threshold inversion
# ---------------------------------------------------------------------------


@given(st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10**6))
@settings(max_examples=40, deadline=None)
def test_threshold_to_cos_squared_soundness(t):
    u = threshold_to_cos_squared(t)
    assert 0 < u.lo and u.hi < 1
    assert u.width <= Fraction(1, 10**12)

    def h(x: Fraction) -> Fraction:
        return t * x * x - (2 * t + 1) * x + t

    # h is strictly decreasing on [0, 1] and the enclosed root is its zero.
    assert h(u.lo) >= 0 >= h(u.hi)


def test_threshold_monotone_in_t():
    # Larger threshold -> larger cos^2 at the window edge.
    u_half = threshold_to_cos_squared(Fraction(1, 2))
    u_one = threshold_to_cos_squared(Fraction(1))
    u_two = threshold_to_cos_squared(Fraction(2))
    assert u_half.hi < u_one.lo < u_one.hi < u_two.lo


@given(st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=10**4))
@settings(max_examples=25, deadline=None)
def test_angle_window_properties(t):
    tol = Fraction(1, 1000)
    theta_min, theta_max = angle_range_from_threshold(t, tol)
    # Mirror symmetry about 90 degrees, by construction.
    assert theta_min.value.lo + theta_max.value.hi == 180
    assert theta_min.value.hi + theta_max.value.lo == 180
    assert theta_min.value.width <= tol
    assert 0 < theta_min.value.lo and theta_min.value.hi < 90
    # The window edge satisfies the defining equation: the enclosure of
    # cos^2/sin^4 over the edge interval must contain the threshold.
    edge = AngleDeg(theta_min.value)
    assert cos2_over_sin4(edge).contains(t)


def test_cos2_over_sin4_special_values():
    ninety = cos2_over_sin4(AngleDeg.from_degrees(90))
    assert ninety.lo == ninety.hi == 0
    sixty = cos2_over_sin4(AngleDeg.from_degrees(60))
    assert sixty.lo == sixty.hi == Fraction(1, 4) / Fraction(9, 16)
    with pytest.raises(SingularAngleError):
        cos2_over_sin4(AngleDeg.from_degrees(0))
    with pytest.raises(SingularAngleError):
        cos2_over_sin4(AngleDeg.from_degrees(180))


@given(st.fractions(min_value=1, max_value=89, max_denominator=360))
@settings(max_examples=30, deadline=None)
def test_cos2_over_sin4_supplement_symmetry(deg):
    a = cos2_over_sin4(AngleDeg.from_degrees(deg))
    b = cos2_over_sin4(AngleDeg.from_degrees(180 - deg))
    assert a.overlaps(b)
