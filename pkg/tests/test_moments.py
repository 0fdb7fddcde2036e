import math
from fractions import Fraction

import pytest

from spectrace import (
    TestFunction as TF,
    bernoulli_numbers,
    comb_pairing,
    euler_maclaurin_expansion,
    heat_trace,
    interval_spectrum,
    moment,
    omega_comb_expansion,
    squares_comb_expansion,
    zeta_neg_int,
)

PI = math.pi
GAUSS = TF.gaussian()
EXP = TF.expdecay()
ODD = TF.odd_gaussian()

# central difference weights of 6th-order accuracy (Fornberg tables)
FD6 = {
    1: ([-3, -2, -1, 1, 2, 3],
        [-1 / 60, 3 / 20, -3 / 4, 3 / 4, -3 / 20, 1 / 60]),
    2: ([-3, -2, -1, 0, 1, 2, 3],
        [1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90]),
    3: ([-4, -3, -2, -1, 1, 2, 3, 4],
        [-7 / 240, 3 / 10, -169 / 120, 61 / 30, -61 / 30, 169 / 120, -3 / 10, 7 / 240]),
    4: ([-4, -3, -2, -1, 0, 1, 2, 3, 4],
        [7 / 240, -2 / 5, 169 / 60, -122 / 15, 91 / 8, -122 / 15, 169 / 60, -2 / 5, 7 / 240]),
}


class TestTestFunctions:
    def test_fd6_weights_sane_on_polynomial(self):
        # sanity for the stencils themselves before using them as an oracle
        poly = lambda x: 1 + 2 * x + 3 * x**2 + 4 * x**3 + 5 * x**4
        exact = {1: 2.0, 2: 6.0, 3: 24.0, 4: 120.0}
        for n, (offs, wts) in FD6.items():
            fd = sum(w * poly(o * 0.1) for o, w in zip(offs, wts)) / 0.1**n
            assert fd == pytest.approx(exact[n], rel=1e-9)

    @pytest.mark.parametrize("g", [GAUSS, EXP, ODD, TF.bump(lo=0.5, hi=1.5)])
    def test_derivative_table_matches_finite_differences(self, g):
        # h balances the 6th-order truncation against roundoff through n = 4
        h = 0.02
        assert g(0.0) == pytest.approx(g.deriv0(0), abs=1e-12)
        for n, (offsets, weights) in FD6.items():
            fd = sum(wgt * g(off * h) for off, wgt in zip(offsets, weights)) / h**n
            assert fd == pytest.approx(g.deriv0(n), abs=1e-8 * max(1.0, abs(g.deriv0(n))))

    @pytest.mark.parametrize("g", [GAUSS, EXP, ODD])
    def test_taylor_remainder_validates_full_table(self, g):
        # the order-12 table must reproduce g near 0 to beyond-table accuracy
        for x in (0.05, -0.05, 0.12):
            taylor = math.fsum(g.deriv0(n) * x**n / math.factorial(n) for n in range(13))
            assert abs(g(x) - taylor) < 1e-11

    def test_closed_form_integrals(self):
        assert GAUSS.integral() == pytest.approx(math.sqrt(PI) / 2, rel=1e-15)
        assert EXP.integral() == 1.0
        assert ODD.integral() == 0.5
        assert GAUSS.integral_invsqrt() == pytest.approx(math.gamma(0.25) / 2, rel=1e-15)
        assert EXP.integral_invsqrt() == pytest.approx(math.sqrt(PI), rel=1e-15)
        assert ODD.integral_over_x() == pytest.approx(math.sqrt(PI) / 2, rel=1e-15)

    def test_bump_quadrature_integrals(self):
        b = TF.bump(lo=1.0, hi=2.0)
        direct = b.integral()
        assert 0 < direct < 1.0
        assert b.integral_invsqrt() < direct  # 1/sqrt(x) < 1 on (1,2)
        assert b.integral_over_x() < direct

    def test_integral_over_x_requires_vanishing_at_zero(self):
        with pytest.raises(ValueError):
            GAUSS.integral_over_x()
        with pytest.raises(ValueError):
            EXP.integral_over_x()

    def test_bump_support_validation(self):
        with pytest.raises(ValueError):
            TF.bump(lo=0.0, hi=1.0)
        with pytest.raises(ValueError):
            TF.bump(lo=2.0, hi=1.0)


class TestCombPairing:
    def test_linear_expdecay_geometric_series(self):
        got = comb_pairing("linear", 0.5, EXP)
        assert abs(got - 1.0 / math.expm1(0.5)) < 1e-12

    def test_squares_expdecay_equals_heat_trace(self):
        t = 0.07
        got = comb_pairing("squares", t, EXP, tol=1e-13)
        trace = heat_trace(interval_spectrum(PI, "dirichlet"), t, tol=1e-13)
        assert got == pytest.approx(trace.value, abs=1e-12)

    def test_bump_outside_support_sums_to_zero(self):
        b = TF.bump(lo=0.5, hi=1.0)  # support radius 1
        assert comb_pairing("linear", 2.0, b) == 0.0

    def test_bump_window_is_exact(self):
        b = TF.bump(lo=1.0, hi=2.0)
        eps = 0.125
        expect = math.fsum(b(n * eps) for n in range(8, 17))
        assert comb_pairing("linear", eps, b) == expect

    @pytest.mark.parametrize("g", [EXP, GAUSS, TF.bump(lo=1.0, hi=2.0)])
    def test_scaling_covariance_exact(self, g):
        # g(cx) sampled at n*eps sees the same float arguments as g at n*(c*eps)
        # when c is a power of two, so the sums agree bitwise
        for c in (2.0, 0.5, 8.0):
            for eps in (0.0625, 0.125, 0.25):
                assert comb_pairing("linear", eps, g.rescaled(c)) == comb_pairing(
                    "linear", c * eps, g)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            comb_pairing("cubes", 0.1, EXP)
        with pytest.raises(ValueError):
            comb_pairing("linear", -0.1, EXP)


class TestEulerMaclaurin:
    def test_first_moment_terms_expdecay(self):
        res = euler_maclaurin_expansion(EXP, 0.3, 3)
        assert res.terms[0] == pytest.approx(1.0 / 0.3, rel=1e-15)
        assert res.terms[1] == pytest.approx(-0.5, rel=1e-15)        # zeta(0) g(0)
        assert res.terms[2] == pytest.approx(0.3 / 12.0, rel=1e-15)  # zeta(-1) g'(0) eps
        assert res.terms[3] == 0.0                                   # zeta(-2) = 0
        assert res.terms[4] == pytest.approx(-0.3**3 / 720.0, rel=1e-15)

    def test_error_bounded_by_first_omitted_term(self):
        # M = 5: orders 6 (zeta = 0) and 7 drive the error
        eps = 0.1
        res = euler_maclaurin_expansion(EXP, eps, 5)
        bound = 2.0 * abs(Fraction(1, 240)) / math.factorial(7) * eps**7
        assert res.abs_error < bound

    def test_exact_laurent_identity(self):
        # the linear expdecay comb is exactly 1/(e^eps - 1)
        for eps in [0.05, 0.2, 1.0]:
            res = euler_maclaurin_expansion(EXP, eps, 4)
            assert res.lhs == pytest.approx(1.0 / math.expm1(eps), abs=1e-13)

    def test_bump_reduces_to_weyl_term(self):
        b = TF.bump(lo=1.0, hi=2.0)
        res = euler_maclaurin_expansion(b, 0.01, 6)
        assert res.rhs == pytest.approx(res.terms[0], rel=1e-15)
        assert all(t == 0.0 for t in res.terms[1:])
        assert res.abs_error < 1e-8  # beyond-all-orders remainder

    def test_order_validation(self):
        with pytest.raises(ValueError):
            euler_maclaurin_expansion(EXP, 0.1, 11)
        with pytest.raises(ValueError):
            euler_maclaurin_expansion(EXP, 0.1, -1)

    @pytest.mark.parametrize("M,slope", [(0, 1.0), (2, 3.0)])
    def test_float_level_convergence_slopes(self, M, slope):
        # orders measurable in float arithmetic; higher ones need the
        # high-precision oracle in the acceptance suite
        import numpy as np
        eps_grid = [10 ** (-1 - k / 4) for k in range(6)]
        errs = [euler_maclaurin_expansion(EXP, e, M).abs_error for e in eps_grid]
        fit = np.polyfit(np.log(eps_grid), np.log(errs), 1)[0]
        assert fit == pytest.approx(slope, abs=0.1)


class TestSquaresComb:
    def test_expdecay_boundary_constant(self):
        res = squares_comb_expansion(EXP, 0.01)
        assert res.rhs == pytest.approx(math.sqrt(PI) / (2 * math.sqrt(0.01)), rel=1e-14)
        assert abs(res.lhs - res.rhs + 0.5) < 1e-8

    def test_gaussian_superpolynomial_decay(self):
        for eps in [0.05, 0.025]:
            res = squares_comb_expansion(GAUSS, eps)
            assert abs(res.lhs - res.rhs + GAUSS(0.0) / 2) < eps**4

    def test_moment_terms_all_zero(self):
        res = squares_comb_expansion(EXP, 0.1)
        assert res.terms == (res.rhs,)  # the Weyl term is the whole rhs


class TestOmegaComb:
    def test_odd_gaussian_half_power_expansion(self):
        res = omega_comb_expansion(ODD, 0.01, 3)
        assert res.abs_error < 0.01**2.5

    def test_leading_term_and_ladder(self):
        eps = 0.04
        res = omega_comb_expansion(ODD, eps, 3)
        assert res.terms[0] == pytest.approx(
            math.sqrt(eps) / 2 * math.sqrt(PI) / 2, rel=1e-14)
        # first moment term scales as eps^1, i.e. sqrt(eps) past the leading
        assert res.terms[1] == pytest.approx(-eps / 4.0, rel=1e-14)
        res2 = omega_comb_expansion(ODD, eps / 4.0, 3)
        assert res2.terms[1] / res.terms[1] == pytest.approx(1.0 / 4.0, rel=1e-12)

    def test_half_power_ladder_spacing(self):
        # successive moment terms step by sqrt(eps): orders (n+2)/2
        eps = 0.09
        bump = TF.bump(lo=0.25, hi=2.0)
        res = omega_comb_expansion(bump, eps, 4)
        # bump derivatives vanish, so build the ladder directly from the formula
        ladder = [eps ** ((n + 2) / 2) for n in range(4)]
        ratios = [b / a for a, b in zip(ladder, ladder[1:])]
        assert all(r == pytest.approx(math.sqrt(eps), rel=1e-12) for r in ratios)

    def test_bump_outside_scaled_support_is_zero(self):
        bump = TF.bump(lo=1.0, hi=2.0)
        res = omega_comb_expansion(bump, 5.0, 2)  # sqrt(eps) > 2 kills all samples
        assert res.lhs == 0.0

    def test_rejects_nonvanishing_at_zero(self):
        with pytest.raises(ValueError):
            omega_comb_expansion(GAUSS, 0.01, 2)
        with pytest.raises(ValueError):
            omega_comb_expansion(EXP, 0.01, 2)


class TestMoments:
    def test_linear_values(self):
        assert moment("linear", 0) == Fraction(-1, 2)
        assert moment("linear", 1) == Fraction(-1, 12)
        assert moment("linear", 2) == 0
        assert moment("linear", 3) == Fraction(1, 120)

    def test_squares_all_zero(self):
        for k in range(6):
            assert moment("squares", k) == 0

    def test_cross_check_against_bernoulli_route(self):
        # eta-series route vs the Bernoulli recurrence: -B_{k+1}/(k+1) with
        # the B_1 = +1/2 convention folded into zeta_neg_int
        for k in range(31):
            assert moment("linear", k) == zeta_neg_int(k)
        bs = bernoulli_numbers(31)
        for k in range(1, 31):
            assert moment("linear", k) == (bs[k + 1] if k % 2 == 0 else -bs[k + 1]) / (k + 1)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            moment("linear", 31)
        with pytest.raises(ValueError):
            moment("cubes", 1)
