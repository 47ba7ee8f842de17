import random
from fractions import Fraction

import pytest

from crjet.hypersurface import family_b0, family_mc, family_nb
from crjet.scalars import EC_I, ExactComplex, NPoly, factorial
from crjet.upsilon import (SYMBOLIC, build_upsilon, compute_D, dim_Vn,
                           gamma_threshold, xi_determinants)

from conftest import random_hypersurface


def leading(p: NPoly):
    return p.leading(), p.degree()


class TestStructuralIdentities:
    def test_second_component_vanishes_at_n0(self):
        # the weight-0 member of the second family is identically zero
        rng = random.Random(31)
        for M in (family_mc(1, 1, 12), family_nb(ExactComplex(2), 2, 12),
                  family_b0(12), random_hypersurface(rng, degree=9)):
            U = build_upsilon(M, 0)
            assert U.components[1].is_zero()

    def test_b0_weight1_fourth_component_vanishes(self):
        U = build_upsilon(family_b0(14), 1)
        assert U.components[3].is_zero()

    def test_b0_weight2_relation(self):
        # 2i * first component == second component at weight 2
        U = build_upsilon(family_b0(14), 2)
        lhs = U.components[0] * (EC_I * 2)
        assert (lhs - U.components[1]).is_zero()


class TestSymbolicNumericConsistency:
    @pytest.mark.parametrize("make", [
        lambda: family_mc(1, 1, 10),
        lambda: family_mc(Fraction(2, 3), 2, 12),
        lambda: family_nb(ExactComplex(1, 1), 2, 12),
        lambda: family_b0(10),
    ])
    def test_eval_matches_fixed_n(self, make):
        M = make()
        sym = build_upsilon(M, SYMBOLIC)
        for n0 in range(7):
            fixed = build_upsilon(M, n0)
            at_n0 = sym.eval_n(n0)
            for a, b in zip(at_n0.components, fixed.components):
                assert (a - b.truncate(a.degree)).is_zero()


class TestXiDeterminants:
    def test_b0_exact_polynomials(self):
        U = build_upsilon(family_b0(14), SYMBOLIC)
        dets = xi_determinants(U)
        assert dets[2] == NPoly([0, 0, 768, 0, -192])
        assert dets[3] == NPoly([0, 0, 18432, 0, -23040, 0, 4608])
        assert dets[4] == NPoly([0, 0, -442368, 0, 995328, 0, -663552, 0, 110592])

    def test_degree_bounds(self):
        for M in (family_b0(14), family_mc(1, 1, 12),
                  family_nb(ExactComplex(3), 2, 14)):
            dets = xi_determinants(build_upsilon(M, SYMBOLIC))
            assert dets[4].degree() <= 8
            assert dets[3].degree() <= 6
            assert dets[2].degree() <= 4

    def test_case1_leading_coefficient(self):
        # K = L = 1, alpha = 1: det of the 4x4 block has leading term 110592 n^8
        dets = xi_determinants(build_upsilon(family_b0(14), SYMBOLIC))
        lead, deg = leading(dets[4])
        assert (lead, deg) == (ExactComplex(110592), 8)

    def test_case2_leading_coefficient(self):
        # L = 1 < K: 64 K (2K)! ((3K)!)^2 / (K!)^8 * alpha^8 n^6, here K = 2, alpha real
        b = Fraction(3, 2)
        dets = xi_determinants(build_upsilon(family_nb(ExactComplex(b), 2, 16),
                                             SYMBOLIC))
        K = 2
        alpha = b * factorial(K)  # theta_1 = b z^2 => theta_1^(2)(0) = 2b
        expected = Fraction(64 * K * factorial(2 * K) * factorial(3 * K) ** 2,
                            factorial(K) ** 8) * alpha ** 8
        lead, deg = leading(dets[3])
        assert (lead, deg) == (ExactComplex(expected), 6)

    def test_case3_leading_coefficient(self):
        # 1 < L <= K: -(4/3) K (2L)!(3L)!(2K)!(3K)!/(L! K!)^5 * alpha^5 n^4
        c = Fraction(2)
        K = L = 2
        dets = xi_determinants(build_upsilon(family_mc(c, 2, 18), SYMBOLIC))
        alpha = c * factorial(L) * factorial(K)  # theta_L^(K)(0) for theta = c z^2 chi^2
        expected = (Fraction(-4, 3) * K * factorial(2 * L) * factorial(3 * L)
                    * factorial(2 * K) * factorial(3 * K)
                    / (factorial(L) * factorial(K)) ** 5 * alpha ** 5)
        lead, deg = leading(dets[2])
        assert (lead, deg) == (ExactComplex(expected), 4)


class TestExceptionalSet:
    def test_families_have_trivial_D(self):
        for M, gamma in ((family_mc(1, 1, 12), 4), (family_mc(1, 2, 18), 2),
                         (family_nb(ExactComplex(1), 2, 14), 3)):
            analysis = compute_D(M)
            assert analysis.D == [0]
            assert analysis.k == 1
            assert analysis.gamma == gamma

    def test_b0_exceptional_set(self):
        analysis = compute_D(family_b0(14))
        assert analysis.D == [0, 1, 2]
        assert analysis.k == 4
        assert analysis.gamma == 4
        assert analysis.scan_bound >= 8
        assert analysis.vn_dims == {0: 2, 1: 2, 2: 3}

    def test_bounds_on_randomized_inputs(self, rng):
        for _ in range(20):
            M = random_hypersurface(rng, degree=18, max_e=2)
            analysis = compute_D(M)
            gamma = gamma_threshold(M.invariants.L, M.invariants.K,
                                    M.invariants.T)
            assert 0 in analysis.D
            assert len(analysis.D) <= 2 * gamma

    def test_dilation_invariance_of_dims(self):
        # z -> 2z sends the j=1 diagonal family with c to the one with 4c;
        # the jet-space dimensions must agree for n <= 6
        M = family_mc(1, 1, 14)
        Ms = family_mc(4, 1, 14)
        for n0 in range(7):
            U = build_upsilon(M, n0)
            Us = build_upsilon(Ms, n0)
            assert dim_Vn(U, 8)[0] == dim_Vn(Us, 8)[0]


class TestGammaThreshold:
    @pytest.mark.parametrize("L,K,T,expected", [
        (1, 1, 1, 4), (1, 1, 0, 3), (1, 2, 1, 3), (1, 2, 0, 2),
        (2, 2, 1, 2), (2, 3, 0, 2), (3, 3, 1, 2),
    ])
    def test_values(self, L, K, T, expected):
        assert gamma_threshold(L, K, T) == expected
