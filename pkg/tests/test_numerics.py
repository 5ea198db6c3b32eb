from fractions import Fraction
import math

import pytest
from hypothesis import assume, given, strategies as st

from ssmlang.numerics import (
    FixedPoint,
    UnitRotation,
    fp_add,
    fp_mul,
    fx_from_str,
    fx_mul,
    fx_sqrt,
    fx_to_str,
    rms_norm,
    rms_norm_raw,
    rot_mul,
    round_shift,
)

P = 8
mantissas = st.integers(min_value=-(1 << 20), max_value=1 << 20)
precisions = st.integers(min_value=1, max_value=24)


def fp(x, p=P):
    return FixedPoint.of(x, p)


def test_add_examples():
    assert fp_add(fp("0.25"), fp("0.5")) == fp("0.75")
    assert fp_add(fp("1.375"), fp(0)) == fp("1.375")
    assert fp_add(fp("-1.5"), fp("1.5")) == fp(0)


def test_mul_examples():
    assert fp_mul(fp("0.25"), fp("0.25")) == fp("0.0625")
    assert fp_mul(fp("0.25", 2), fp("0.25", 2)) == fp(0, 2)
    assert fp_mul(fp("-3.75"), fp(1)) == fp("-3.75")


def test_ties_go_to_even():
    assert round_shift(1, 1) == 0
    assert round_shift(3, 1) == 2
    assert round_shift(-1, 1) == 0
    assert round_shift(5, 2) == 1
    assert round_shift(6, 2) == 2


def test_rms_norm_examples():
    ones = tuple(fp(1) for _ in range(4))
    assert rms_norm(ones) == ones
    assert rms_norm((fp(3), fp(0), fp(0), fp(0))) == (fp(2), fp(0), fp(0), fp(0))
    assert rms_norm(tuple(fp("0.75") for _ in range(5))) == tuple(fp(1) for _ in range(5))


def test_rms_norm_zero_vector_raises():
    with pytest.raises(ZeroDivisionError):
        rms_norm_raw((0, 0, 0), P)


def test_mixed_precision_rejected():
    with pytest.raises(ValueError):
        fp_add(fp(1, 8), fp(1, 9))


def test_rotation_examples():
    assert rot_mul(UnitRotation(1, 2), UnitRotation(1, 2)) == UnitRotation(0, 1)
    assert rot_mul(UnitRotation(1, 3), UnitRotation(1, 3)) == UnitRotation(2, 3)
    assert rot_mul(UnitRotation(2, 5), UnitRotation(4, 5)) == UnitRotation(1, 5)


def test_rotation_canonical_form():
    r = UnitRotation(6, 4)
    assert (r.numerator, r.denominator) == (1, 2)
    assert str(UnitRotation(-1, 3)) == "2/3"
    with pytest.raises(ValueError):
        UnitRotation(1, 0)


def test_decimal_strings_are_exact():
    assert fx_to_str(1, 8) == "0.00390625"
    assert fx_to_str(-384, 8) == "-1.5"
    assert fx_from_str("0.00390625", 8) == 1
    with pytest.raises(ValueError):
        fx_from_str("0.001", 8)


@given(mantissas, mantissas, precisions)
def test_mul_error_bound(a, b, p):
    exact = Fraction(a * b, 1 << (2 * p))
    got = Fraction(fx_mul(a, b, p), 1 << p)
    assert abs(got - exact) <= Fraction(1, 1 << (p + 1))


@given(mantissas, mantissas, mantissas)
def test_add_is_exact_and_associative(a, b, c):
    x, y, z = FixedPoint(a), FixedPoint(b), FixedPoint(c)
    assert fp_add(fp_add(x, y), z) == fp_add(x, fp_add(y, z))
    assert fp_add(x, y).to_fraction() == x.to_fraction() + y.to_fraction()


@given(st.integers(min_value=0, max_value=1 << 40), precisions)
def test_sqrt_is_nearest_grid_point(a, p):
    s = fx_sqrt(a, p)
    exact = math.sqrt(a / (1 << p)) * (1 << p)
    assert abs(s - exact) <= 0.5 + 1e-6


@given(st.lists(mantissas, min_size=1, max_size=8), precisions)
def test_rms_norm_entries_bounded(v, p):
    # squares of values below one grid step's square root underflow to zero
    assume(any(abs(x) >= 1 << p for x in v))
    out = rms_norm_raw(v, p)
    bound = math.sqrt(len(v)) * (1 << p) + 1
    assert all(abs(x) <= bound for x in out)


@given(st.integers(min_value=1 << (P - 1), max_value=1 << 30), st.integers(min_value=1, max_value=8))
def test_rms_norm_constant_vector_is_ones(c, d):
    assert rms_norm_raw([c] * d, P) == (1 << P,) * d


@given(st.integers(0, 50), st.integers(1, 50), st.integers(0, 50), st.integers(1, 50),
       st.integers(0, 50), st.integers(1, 50))
def test_rotations_form_a_group(a, b, c, d, e, f):
    x, y, z = UnitRotation(a, b), UnitRotation(c, d), UnitRotation(e, f)
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * x.inverse() == UnitRotation(0)
    assert (x ** x.denominator).is_identity()
    assert 0 <= (x * y).numerator < (x * y).denominator
    assert math.gcd((x * y).numerator, (x * y).denominator) == 1


@given(mantissas, precisions)
def test_decimal_round_trip(m, p):
    assert fx_from_str(fx_to_str(m, p), p) == m
