import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from phase_contract.numbers import HalfInt, LogDomainReal, SqrtRational, half

doubled = st.integers(min_value=-200, max_value=200)


class TestHalfInt:
    def test_coercions(self):
        assert half("3/2") == HalfInt(3)
        assert half(2) == HalfInt(4)
        assert half(Fraction(1, 2)).twice_value == 1
        assert str(HalfInt(3)) == "3/2" and str(HalfInt(4)) == "2"

    @pytest.mark.parametrize("bad", [0.5, True, "1/3", Fraction(1, 4)])
    def test_rejects_ambiguous(self, bad):
        with pytest.raises((TypeError, ValueError)):
            half(bad)

    @given(doubled, doubled)
    def test_arithmetic_closed(self, a, b):
        x, y = HalfInt(a), HalfInt(b)
        assert (x + y).twice_value == a + b
        assert (x - y).twice_value == a - b
        assert -(-x) == x
        assert (x < y) == (a < b)

    def test_magnetic_range_descends(self):
        assert [m.twice_value for m in HalfInt(3).magnetic_range()] == [3, 1, -1, -3]

    def test_int_conversion(self):
        assert int(HalfInt(4)) == 2
        with pytest.raises(ValueError):
            int(HalfInt(3))


fractions = st.fractions(min_value=Fraction(1, 1000), max_value=1000)


class TestSqrtRational:
    def test_lowest_terms(self):
        x = SqrtRational(1, 6, 8)
        assert (x.numerator, x.denominator) == (3, 4)

    @given(st.sampled_from([-1, 1]), fractions, st.sampled_from([-1, 1]), fractions)
    def test_mul_div(self, s1, r1, s2, r2):
        a = SqrtRational.signed_sqrt(s1, r1)
        b = SqrtRational.signed_sqrt(s2, r2)
        assert math.isclose(float(a * b), float(a) * float(b), rel_tol=1e-12)
        assert math.isclose(float(a / b), float(a) / float(b), rel_tol=1e-12)

    @given(fractions, st.integers(1, 20), st.integers(-20, 20))
    def test_add_like_terms(self, r, p, q):
        # p sqrt(r) + q sqrt(r) = (p + q) sqrt(r)
        a = SqrtRational.signed_sqrt(1, r * p * p)
        b = SqrtRational.signed_sqrt(1 if q >= 0 else -1, r * q * q)
        assert math.isclose(float(a + b), (p + q) * math.sqrt(r), rel_tol=1e-12, abs_tol=1e-300)

    def test_add_unlike_terms_refused(self):
        with pytest.raises(ValueError):
            SqrtRational.signed_sqrt(1, Fraction(2)) + SqrtRational.from_rational(1)

    def test_float_of_huge_ratio(self):
        x = SqrtRational(1, math.factorial(400), math.factorial(399))
        assert math.isclose(float(x), math.sqrt(400), rel_tol=1e-12)

    def test_str(self):
        assert str(SqrtRational.signed_sqrt(1, Fraction(1, 2))) == "+sqrt(1/2)"
        assert str(SqrtRational.signed_sqrt(-1, Fraction(1, 4))) == "-1/2"
        assert str(SqrtRational.zero()) == "0"


class TestLogDomainReal:
    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    def test_products(self, a, b):
        x, y = LogDomainReal.from_float(a), LogDomainReal.from_float(b)
        assert math.isclose(float(x * y), a * b, rel_tol=1e-12, abs_tol=1e-300)

    def test_sum_beyond_float_range(self):
        big = LogDomainReal(1, 1000.0)
        total = LogDomainReal.sum([big, big, -big])
        assert total.sign == 1 and math.isclose(total.log_magnitude, 1000.0, rel_tol=1e-14)

    def test_cancellation_to_zero(self):
        x = LogDomainReal(1, 3.0)
        assert LogDomainReal.sum([x, -x]).sign == 0
