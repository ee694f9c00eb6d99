import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from curlspec.bessel import (
    MAX_ORDER,
    bessel_j,
    bessel_jp,
    bessel_y,
    bessel_yp,
    bessel_zero,
    j_table,
    taylor_partial_sum,
    taylor_remainder_bound,
    y_table,
)


@pytest.mark.parametrize("order", [0, 1, 2, 5, 10, 30, 64])
def test_j_matches_scipy_on_wide_range(order):
    x = np.linspace(-50, 50, 2001)
    assert np.max(np.abs(bessel_j(order, x) - special.jv(order, x))) < 2e-15


@pytest.mark.parametrize("order", [0, 1, 2, 7, 20])
def test_y_matches_scipy(order):
    x = np.linspace(0.05, 60, 1500)
    want = special.yv(order, x)
    got = bessel_y(order, x)
    rel = np.abs(got - want) / np.maximum(1.0, np.abs(want))
    assert np.max(rel) < 1e-11


def test_high_order_small_argument_keeps_relative_accuracy():
    for x in (0.3, 1.0, 5.0):
        want = mpmath.besselj(64, x)
        assert abs(bessel_j(64, x) - float(want)) <= 1e-13 * abs(float(want))


def test_against_mpmath_at_scattered_points():
    for order, x in [(0, 2.404825557695773), (3, 17.25), (8, 0.75), (1, 123.4)]:
        assert abs(bessel_j(order, x) - float(mpmath.besselj(order, x))) < 1e-14
    for order, x in [(0, 0.01), (2, 3.3), (5, 40.0)]:
        want = float(mpmath.bessely(order, x))
        assert abs(bessel_y(order, x) - want) < 1e-12 * max(1.0, abs(want))


def test_negative_order_and_argument_symmetries():
    x = np.linspace(0.1, 20, 100)
    for m in range(1, 6):
        assert np.allclose(bessel_j(-m, x), (-1) ** m * bessel_j(m, x), atol=0, rtol=0)
        assert np.allclose(bessel_y(-m, x), (-1) ** m * bessel_y(m, x), atol=0, rtol=0)
        assert np.allclose(bessel_j(m, -x), (-1) ** m * bessel_j(m, x), atol=0, rtol=0)


def test_derivatives():
    x = np.linspace(0.2, 30, 300)
    assert np.max(np.abs(bessel_jp(3, x) - special.jvp(3, x))) < 1e-14
    assert np.max(np.abs(bessel_yp(2, x) - special.yvp(2, x))) < 1e-11


def test_tables_are_consistent_with_single_orders():
    x = np.array([0.3, 2.0, 11.0])
    t = j_table(6, x)
    for k in range(7):
        assert np.array_equal(t[k], bessel_j(k, x))
    assert y_table(4, x).shape == (5, 3)


def test_scalar_in_scalar_out():
    assert isinstance(bessel_j(0, 1.0), float)
    assert isinstance(bessel_y(1, 2.0), float)


@pytest.mark.parametrize("m,k", [(0, 1), (0, 2), (1, 1), (1, 3), (4, 2), (10, 1)])
def test_zeros_match_scipy(m, k):
    assert abs(bessel_zero(m, k) - special.jn_zeros(m, k)[-1]) < 1e-11


def test_known_zero_values():
    assert abs(bessel_zero(0, 1) - 2.404825557695773) < 1e-12
    assert abs(bessel_zero(1, 1) - 3.831705970207512) < 1e-12


def test_order_validation():
    with pytest.raises(TypeError):
        bessel_j(1.5, 1.0)
    with pytest.raises(ValueError):
        bessel_j(MAX_ORDER + 1, 1.0)
    with pytest.raises(ValueError):
        bessel_y(0, 0.0)
    with pytest.raises(ValueError):
        bessel_y(0, -1.0)
    with pytest.raises(ValueError):
        bessel_zero(-1, 1)
    with pytest.raises(ValueError):
        bessel_zero(0, 0)
    with pytest.raises(ValueError):
        bessel_j(0, np.inf)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=0, max_value=20),
    st.floats(min_value=0.01, max_value=80, allow_nan=False),
)
def test_three_term_recurrence(n, x):
    lhs = bessel_j(n, x) + bessel_j(n + 2, x)
    rhs = 2 * (n + 1) / x * bessel_j(n + 1, x)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.05, max_value=60, allow_nan=False))
def test_wronskian(x):
    w = bessel_j(1, x) * bessel_y(0, x) - bessel_j(0, x) * bessel_y(1, x)
    assert abs(w - 2 / (math.pi * x)) < 1e-11 * max(1.0, 2 / (math.pi * x))


def test_taylor_partial_sum_is_exact():
    x = Fraction(3, 2)
    got = taylor_partial_sum(2, 3, x)
    want = sum(
        Fraction((-1) ** m, math.factorial(m) * math.factorial(m + 2)) * (x / 2) ** (2 * m + 2)
        for m in range(4)
    )
    assert got == want
    assert isinstance(got, Fraction)


def test_taylor_remainder_bound_values():
    assert taylor_remainder_bound(5) == Fraction(729, 163840)
    assert taylor_remainder_bound(1) == 18 * Fraction(9, 16) / 2
    with pytest.raises(ValueError):
        taylor_remainder_bound(0)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(min_value=0, max_value=4),
    st.integers(min_value=1, max_value=8),
    st.fractions(min_value=-3, max_value=3, max_denominator=500),
)
def test_remainder_bound_holds(n, M, x):
    exact = mpmath.besselj(n, mpmath.mpf(x.numerator) / x.denominator)
    diff = abs(exact - mpmath.mpf(taylor_partial_sum(n, M, x).numerator)
               / taylor_partial_sum(n, M, x).denominator)
    assert diff <= float(taylor_remainder_bound(M))
