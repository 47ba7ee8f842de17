import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from crjet.scalars import EC_I, ExactComplex
from crjet.series import (SeriesError, TruncatedSeries, compose, divide,
                          implicit_solve, inverse_unit, kth_root_unit)

from conftest import rand_complex, random_series

DEG = 8
XY = ("x", "y")


def srs(coeffs, degree=DEG, variables=XY):
    return TruncatedSeries(variables, degree, coeffs)


small_series = st.builds(
    lambda seed, deg: random_series(random.Random(seed), XY, deg, 5),
    st.integers(0, 10 ** 6), st.integers(3, DEG))


class TestArithmetic:
    @given(small_series, small_series)
    def test_mul_commutes_and_degree_is_min(self, a, b):
        assert a * b == b * a
        assert (a * b).degree == min(a.degree, b.degree)

    @given(small_series, small_series, small_series)
    def test_distributive(self, a, b, c):
        assert (a + b) * c == a * c + b * c

    def test_power_by_squaring(self):
        x = TruncatedSeries.var("x", XY, DEG)
        one = TruncatedSeries.const(XY, DEG, 1)
        p = (one + x) ** 5
        for k in range(6):
            assert p.coeff((k, 0)) == ExactComplex(
                [1, 5, 10, 10, 5, 1][k])

    def test_truncation_drops_high_terms(self):
        a = srs({(5, 0): ExactComplex(1), (1, 1): ExactComplex(2)})
        t = a.truncate(3)
        assert t.degree == 3
        assert t.coeff((5, 0)).is_zero()
        assert t.coeff((1, 1)) == ExactComplex(2)


class TestDifferentiationAndJets:
    def test_jet_coeff_includes_factorials(self):
        a = srs({(2, 3): ExactComplex(Fraction(1, 12))})
        assert a.jet_coeff((2, 3)) == ExactComplex(1)  # 2! 3! / 12

    def test_differentiate(self):
        a = srs({(3, 1): ExactComplex(2)})
        d = a.differentiate("x", 2)
        assert d.coeff((1, 1)) == ExactComplex(12)

    @given(small_series)
    def test_conjugate_is_involution(self, a):
        assert a.conjugate().conjugate() == a

    def test_conjugate_rename(self):
        a = TruncatedSeries(("z",), DEG, {(1,): EC_I})
        b = a.conjugate(rename={"z": "chi"})
        assert b.variables == ("chi",)
        assert b.coeff((1,)) == EC_I * (-1)


class TestComposition:
    def test_associativity_on_example(self):
        rng = random.Random(7)
        h = random_series(rng, ("u",), 6, 4)
        f = random_series(rng, ("x",), 6, 4, min_order=1)
        g = random_series(rng, ("x",), 6, 4, min_order=1)
        lhs = compose(compose(h, {"u": f}), {"x": g})
        rhs = compose(h, {"u": compose(f, {"x": g})})
        assert lhs == rhs

    def test_rejects_non_vanishing_argument(self):
        h = random_series(random.Random(1), ("u",), 4, 3)
        bad = TruncatedSeries.const(("x",), 4, 1)
        with pytest.raises(SeriesError):
            compose(h, {"u": bad})


class TestUnits:
    @given(small_series)
    def test_inverse_unit(self, a):
        one = TruncatedSeries.const(XY, a.degree, 1)
        u = one + a - TruncatedSeries.const(XY, a.degree, a.coeff((0, 0)))
        assert u * inverse_unit(u) == one.truncate(u.degree)

    def test_divide_exact(self):
        x = TruncatedSeries.var("x", XY, DEG)
        y = TruncatedSeries.var("y", XY, DEG)
        one = TruncatedSeries.const(XY, DEG, 1)
        num = (x * x * y) * (one + y * 3)
        q = divide(num, x * x * y)
        assert q == (one + y * 3).truncate(q.degree)

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_kth_root_unit(self, k):
        rng = random.Random(k)
        a = random_series(rng, XY, DEG, 4, min_order=1)
        one = TruncatedSeries.const(XY, DEG, 1)
        u = one + a
        r = kth_root_unit(u, k)
        assert r ** k == u.truncate(r.degree)


class TestImplicitSolve:
    def test_postcondition(self):
        # rho(w,x) = w - x - w^2: solve w(x); check rho(w(x), x) = 0
        WV = ("w", "x")
        w = TruncatedSeries.var("w", WV, DEG)
        x = TruncatedSeries.var("x", WV, DEG)
        rho = w - x - w * w
        sol = implicit_solve(rho, "w")
        back = compose(rho, {"w": sol.embed(("x",)).embed(("x",)),
                             "x": TruncatedSeries.var("x", ("x",), sol.degree)})
        assert back.is_zero()
        # Catalan coefficients: w = sum C_k x^(k+1)
        for k, cat in enumerate([1, 1, 2, 5, 14]):
            assert sol.coeff((k + 1,)) == ExactComplex(cat)

    def test_requires_unit_linear_part(self):
        WV = ("w", "x")
        w = TruncatedSeries.var("w", WV, DEG)
        x = TruncatedSeries.var("x", WV, DEG)
        with pytest.raises(SeriesError):
            implicit_solve(w * w - x, "w")


class TestEvalN:
    def test_npoly_coefficients_evaluate(self):
        from crjet.scalars import NPoly
        a = TruncatedSeries(XY, 4, {(1, 0): NPoly([0, 1]),        # n
                                    (0, 1): NPoly([1, 0, 2])})    # 1+2n^2
        at3 = a.eval_n(3)
        assert at3.coeff((1, 0)) == ExactComplex(3)
        assert at3.coeff((0, 1)) == ExactComplex(19)
