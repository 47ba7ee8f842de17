import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from crjet.scalars import (EC_I, ExactComplex, NPoly, ScalarError,
                           falling_binomial, factorial, integer_roots,
                           rational_nth_root, rising_binomial)

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=9)
complexes = st.builds(ExactComplex, fracs, fracs)


class TestExactComplex:
    def test_basic_arithmetic(self):
        a = ExactComplex(Fraction(1, 2), Fraction(-3))
        b = ExactComplex(2, Fraction(1, 3))
        assert a + b == ExactComplex(Fraction(5, 2), Fraction(-8, 3))
        assert a * b == ExactComplex(2, Fraction(-35, 6))
        assert (a - a).is_zero()
        assert EC_I * EC_I == ExactComplex(-1)

    @given(complexes, complexes)
    def test_conjugation_is_multiplicative(self, a, b):
        assert (a * b).conj() == a.conj() * b.conj()
        assert (a + b).conj() == a.conj() + b.conj()

    @given(complexes)
    def test_norm_and_inverse(self, a):
        assert a.norm_sq() == (a * a.conj()).re
        if not a.is_zero():
            assert a * a.inverse() == ExactComplex(1)

    @given(complexes, complexes, complexes)
    def test_ring_axioms(self, a, b, c):
        assert (a + b) * c == a * c + b * c
        assert a * (b * c) == (a * b) * c

    def test_coerce_rejects_garbage(self):
        with pytest.raises((ScalarError, TypeError, ValueError)):
            ExactComplex.coerce("1/2")

    def test_is_real(self):
        assert ExactComplex(3).is_real()
        assert not ExactComplex(0, 1).is_real()


class TestNPoly:
    def test_eval_and_arithmetic(self):
        p = NPoly([1, 0, 2])  # 1 + 2 n^2
        q = NPoly([0, 1])     # n
        assert (p * q)(3) == ExactComplex(3 * (1 + 18))
        assert (p + q)(-2) == ExactComplex(9 - 2)

    @given(st.lists(st.integers(-9, 9), max_size=5),
           st.lists(st.integers(-9, 9), max_size=5),
           st.integers(-6, 6))
    def test_product_evaluation_commutes(self, ca, cb, n):
        p, q = NPoly(ca), NPoly(cb)
        assert (p * q)(n) == p(n) * q(n)


class TestBinomialPolynomials:
    @pytest.mark.parametrize("k", range(6))
    def test_falling_matches_binomial(self, k):
        for n in range(k, 10):
            assert falling_binomial(k)(n) == ExactComplex(math.comb(n, k))

    @pytest.mark.parametrize("k", range(6))
    def test_rising_matches_binomial(self, k):
        for n in range(0, 10):
            expected = 1 if k == 0 else math.comb(n + k - 1, k)
            assert rising_binomial(k)(n) == ExactComplex(expected)

    def test_generating_identity(self):
        # (1+x)^n * (1-x)^(-n) coefficients: sum_j C(n,j) C(n+k-j-1, k-j)
        n, deg = 4, 6
        for k in range(deg + 1):
            direct = sum(math.comb(n, j) * math.comb(n + (k - j) - 1, k - j)
                         for j in range(min(k, n) + 1))
            via = sum((falling_binomial(j)(n) * rising_binomial(k - j)(n)).re
                      for j in range(k + 1))
            assert via == direct


class TestIntegerRoots:
    def test_known_roots(self):
        # (n-2)(n+3)n = n^3 + n^2 - 6n; only nonnegative roots are reported
        p = NPoly([0, -6, 1, 1])
        assert integer_roots(p) == {0, 2}

    def test_no_integer_roots(self):
        assert integer_roots(NPoly([1, 0, 1])) == set()  # n^2 + 1

    @given(st.sets(st.integers(-8, 8), min_size=1, max_size=4))
    def test_constructed_roots_recovered(self, roots):
        p = NPoly([1])
        for r in roots:
            p = p * NPoly([-r, 1])
        assert integer_roots(p) == {r for r in roots if r >= 0}


class TestRationalNthRoot:
    def test_exact_roots(self):
        assert rational_nth_root(Fraction(8, 27), 3) == Fraction(2, 3)
        assert rational_nth_root(Fraction(1, 4), 2) == Fraction(1, 2)
        assert rational_nth_root(Fraction(1), 7) == 1

    def test_irrational_reports_none(self):
        assert rational_nth_root(Fraction(2), 2) is None
        assert rational_nth_root(Fraction(5, 3), 4) is None

    @given(st.fractions(min_value=0, max_value=9, max_denominator=9),
           st.integers(1, 4))
    def test_round_trip(self, q, k):
        if q <= 0:
            return
        assert rational_nth_root(q ** k, k) == q


def test_factorial():
    assert [factorial(k) for k in range(6)] == [1, 1, 2, 6, 24, 120]
