import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from fractoback.errors import (
    InvalidOrder, InvalidParams, NoConvergence, SmallArgument,
)
from fractoback.mlf import (
    DEFAULT_SETTINGS, FractionalOrders, Method, MLArguments, MLParams,
    invert_rows, mlf_asymptotic, mlf_eval, mlf_oracle, mlf_series, propagator,
    propagator_oracle, relaxation, relaxation_leading, relaxation_oracle,
)
from oracles import classical_ml, erfc_identity, fit_slope


class TestTypes:
    @pytest.mark.parametrize("rhos", [(0.5, 0.5), (0.3, 0.6), (1.2,), (0.0,), (0.5, -0.1)])
    def test_bad_orders(self, rhos):
        with pytest.raises(InvalidParams):
            FractionalOrders(rhos)

    def test_leading_weight(self):
        with pytest.raises(InvalidParams):
            FractionalOrders((0.8, 0.4), (2.0, 1.0))
        with pytest.raises(InvalidParams):
            FractionalOrders((0.8, 0.4), (1.0, 0.0))

    def test_unit_order_only_in_test_mode(self):
        with pytest.raises(InvalidParams):
            FractionalOrders((1.0,))
        assert FractionalOrders((1.0,), test_mode=True).rho1 == 1.0
        with pytest.raises(InvalidParams):
            FractionalOrders((1.0, 0.5), test_mode=True)

    def test_shifted(self, three_term):
        assert three_term.shifted == pytest.approx((0.7, 0.2, 0.6))

    def test_params_and_args(self):
        with pytest.raises(InvalidParams):
            MLParams(0.0, (0.5,))
        with pytest.raises(InvalidParams):
            MLParams(1.0, (1.0,))
        with pytest.raises(InvalidParams):
            MLArguments((0.5,))
        with pytest.raises(InvalidParams):
            mlf_series(MLParams(1.0, (0.5, 0.2)), MLArguments((-1.0,)))


class TestSeries:
    def test_zero_argument(self):
        r = mlf_series(MLParams(1.0, (0.5,)), MLArguments((0.0,)))
        assert r.value == 1.0
        assert r.method is Method.SERIES

    def test_exponential(self):
        r = mlf_series(MLParams(1.0, (1.0,), allow_unit=True), MLArguments((-1.0,)))
        assert r.value == pytest.approx(math.exp(-1), rel=1e-14)

    def test_erfc_identity(self):
        r = mlf_series(MLParams(1.0, (0.5,)), MLArguments((-1.0,)))
        assert r.value == pytest.approx(erfc_identity(-1.0), rel=1e-13)
        assert r.value == pytest.approx(0.4275836, abs=1e-7)
        assert r.est_abs_error < 1e-13

    def test_no_convergence(self):
        with pytest.raises(NoConvergence):
            mlf_series(MLParams(1.0, (0.5,)), MLArguments((-3.0,)), kmax=5)

    def test_bad_tol(self):
        with pytest.raises(InvalidParams):
            mlf_series(MLParams(1.0, (0.5,)), MLArguments((-1.0,)), tol=0.0)

    def test_multinomial_against_oracle(self):
        p = MLParams(1.8, (0.8, 0.4))
        a = MLArguments((-2.0, -1.0))
        assert mlf_series(p, a).value == pytest.approx(mlf_oracle(p, a).value, rel=1e-12)

    def test_zero_second_argument_reduces_to_single_term(self):
        two = mlf_series(MLParams(1.3, (0.6, 0.2)), MLArguments((-2.5, 0.0)))
        one = classical_ml(0.6, 1.3, -2.5)
        assert two.value == pytest.approx(one, rel=1e-12)


class TestAsymptotic:
    def test_one_term_substitution(self):
        r = mlf_asymptotic(MLParams(1.9, (0.8,)), MLArguments((-1e6,)), p=1)
        assert r.value == pytest.approx(1e-6 / math.gamma(1.1), rel=1e-15)
        assert r.method is Method.ASYMPTOTIC

    def test_relaxation_specialisation(self, two_term):
        # beta0 = rho_1 + 1 gives Gamma(beta0 - rho_1) = 1 in the leading term
        z1 = -1e7
        p = MLParams.for_orders(two_term, two_term.rho1 + 1)
        r = mlf_asymptotic(p, MLArguments((z1, -1.0)), p=1)
        assert r.value == pytest.approx(1.0 / 1e7, rel=1e-15)

    def test_errors(self):
        p, a = MLParams(1.9, (0.8,)), MLArguments((-100.0,))
        with pytest.raises(InvalidOrder):
            mlf_asymptotic(p, a, p=3)
        with pytest.raises(SmallArgument):
            mlf_asymptotic(p, MLArguments((-1.0,)))

    def test_pole_terms_vanish(self):
        # beta0 = 2 rho_1: 1/Gamma(0) = 0 drops the second coefficient
        r = mlf_asymptotic(MLParams(1.6, (0.8,)), MLArguments((-1e3,)), p=2)
        assert r.value == pytest.approx(1e-3 / math.gamma(0.8), rel=1e-15)

    def test_matches_reference_at_1e3(self):
        p = MLParams(1.8, (0.8, 0.4))
        a = MLArguments((-1e3, -1.0))
        ref = mlf_oracle(p, a).value
        assert abs(mlf_asymptotic(p, a).value - ref) / abs(ref) <= 1e-4

    def test_error_estimate_covers_single_term_error(self):
        p = MLParams(1.9, (0.8,))
        for z in (-1e2, -1e3, -1e4):
            a = MLArguments((z,))
            r = mlf_asymptotic(p, a)
            assert abs(r.value - mlf_oracle(p, a).value) <= 2 * r.est_abs_error

    def test_third_order_error_slope(self):
        p = MLParams(1.8, (0.8, 0.4))
        zs = np.logspace(2, 4, 7)
        errs = [abs(mlf_asymptotic(p, MLArguments((-z, -1.0))).value
                    - mlf_oracle(p, MLArguments((-z, -1.0)), nodes=48).value) for z in zs]
        assert fit_slope(zs, errs) == pytest.approx(-3.0, abs=0.3)
        scaled = np.array(errs) * zs**3
        assert scaled.max() / scaled.min() < 2.0


class TestDispatch:
    def test_zero(self):
        r = mlf_eval(MLParams(1.7, (0.4, 0.1)), MLArguments((0.0, 0.0)))
        assert r.value == pytest.approx(1 / math.gamma(1.7), rel=1e-15)
        assert r.method is Method.SERIES

    def test_erfc_at_minus_four(self):
        # exp(16) erfc(4) = 0.1369995; see the decisions ledger for the quoted value
        r = mlf_eval(MLParams(1.0, (0.5,)), MLArguments((-4.0,)))
        assert r.value == pytest.approx(0.13699945762506138, rel=1e-10)

    def test_methods_by_regime(self):
        p = MLParams(1.8, (0.8, 0.4))
        assert mlf_eval(p, MLArguments((-1.0, -1.0))).method is Method.SERIES
        assert mlf_eval(p, MLArguments((-500.0, -1.0))).method is Method.CONTOUR
        big = -2 * DEFAULT_SETTINGS.z_switch
        assert mlf_eval(p, MLArguments((big, -1.0))).method is Method.ASYMPTOTIC

    def test_vanishing_leading_coefficient_stays_on_contour(self):
        p = MLParams(0.8, (0.8,))
        r = mlf_eval(p, MLArguments((-2 * DEFAULT_SETTINGS.z_switch,)))
        assert r.method is Method.CONTOUR

    def test_boundary_consistency(self):
        p = MLParams(1.8, (0.8, 0.4))
        zs = DEFAULT_SETTINGS.z_switch
        for z in np.geomspace(zs / 2, 2 * zs, 5):
            a = MLArguments((-z, -1.0))
            asym = mlf_asymptotic(p, a).value
            cont, _ = invert_rows(p.beta0, p.betas, np.array([[z, 1.0]]))
            assert abs(asym - cont[0]) / abs(cont[0]) <= 1e-6

    @pytest.mark.parametrize("rho", [0.3, 0.5, 0.8])
    def test_single_term_reduction(self, rho):
        for z in np.linspace(-10, 0, 11):
            ref = classical_ml(rho, 1.0, z)
            got = mlf_eval(MLParams(1.0, (rho,)), MLArguments((z,))).value
            assert abs(got - ref) <= 1e-10 * abs(ref)

    def test_lemma_bound(self, two_term):
        # |E_{rho', beta}(z_1, z_2)| <= C / (1 + |z_1|) with one C on the grid
        ratios = []
        for beta in (0.5, 1.0, 1.8):
            p = MLParams.for_orders(two_term, beta)
            for z1 in -np.logspace(-2, 5, 30):
                for z2 in (-0.1, -1.0, -5.0):
                    v = mlf_eval(p, MLArguments((z1, z2))).value
                    ratios.append(abs(v) * (1 + abs(z1)))
        C = max(ratios)
        assert np.isfinite(C) and C < 10


class TestRelaxation:
    def test_initial_value_exact(self, two_term):
        assert relaxation(two_term, 5.0, 0.0) == 1.0
        assert np.all(relaxation(two_term, [1.0, 1e4], [0.0, 0.0]) == 1.0)

    def test_single_term_identity(self):
        o = FractionalOrders((0.5,))
        assert relaxation(o, 1.0, 1.0) == pytest.approx(erfc_identity(-1.0), rel=1e-12)

    @pytest.mark.parametrize("rho", [0.3, 0.5, 0.9])
    def test_classical_relaxation(self, rho):
        o = FractionalOrders((rho,))
        for x in np.geomspace(1e-3, 10, 9):
            ref = classical_ml(rho, 1.0, -x)
            assert relaxation(o, x, 1.0) == pytest.approx(ref, rel=1e-10)

    def test_large_lambda_leading_term(self, two_term):
        lam = 1e6
        expected = 1e-6 * (1 / math.gamma(0.2) + 1 / math.gamma(0.6))
        assert relaxation(two_term, lam, 1.0) == pytest.approx(expected, rel=1e-5)
        for lam in (1e4, 1e5, 1e6):
            got = lam * relaxation(two_term, lam, 1.0)
            assert got == pytest.approx(relaxation_leading(two_term.rhos, two_term.weights, 1.0),
                                        rel=2.0 / lam ** 0.8 + 1e-9)

    def test_monotone_and_positive(self, three_term):
        t = np.linspace(0, 3, 200)
        for lam in (0.1, 1.0, 25.0, 1e3):
            w = relaxation(three_term, lam, t)
            assert w[0] == 1.0
            assert np.all(w > 0)
            assert np.all(np.diff(w) < 0)

    def test_rejects_bad_input(self, two_term):
        with pytest.raises(InvalidParams):
            relaxation(two_term, 0.0, 1.0)
        with pytest.raises(InvalidParams):
            relaxation(two_term, 1.0, -1.0)

    def test_classical_limit(self):
        o = FractionalOrders((1.0,), test_mode=True)
        lam = np.array([0.5, 3.0, 9.0])
        assert np.allclose(relaxation(o, lam, 1.0), np.exp(-lam), rtol=0, atol=1e-12)


class TestPropagator:
    def test_classical_limit(self):
        o = FractionalOrders((1.0,), test_mode=True)
        assert propagator(o, 2.0, 1.0) == pytest.approx(math.exp(-2), rel=1e-10)

    def test_small_xi(self, two_term):
        # the second argument scales like xi^rho_2, so go far enough down
        xi = 1e-25
        scaled = xi ** (1 - two_term.rho1) * propagator(two_term, 3.0, xi)
        assert scaled == pytest.approx(1 / math.gamma(two_term.rho1), rel=1e-8)

    def test_bound(self, two_term):
        xi = np.geomspace(1e-4, 2.0, 40)
        ratios = []
        for lam in (1.0, 16.0, 256.0, 4096.0):
            p = propagator(two_term, lam, xi)
            ratios.append(np.abs(p) * (1 + lam * xi**two_term.rho1) / xi ** (two_term.rho1 - 1))
        C = np.max(ratios)
        assert np.isfinite(C) and C < 5

    def test_rejects_origin(self, two_term):
        with pytest.raises(InvalidParams):
            propagator(two_term, 1.0, 0.0)

    def test_against_oracle(self, three_term):
        for lam, xi in [(1.0, 0.3), (50.0, 1.0), (2e3, 0.05)]:
            assert propagator(three_term, lam, xi) == pytest.approx(
                propagator_oracle(three_term, lam, xi), rel=1e-9)


class TestOracle:
    def test_exponential(self):
        o = FractionalOrders((1.0,), test_mode=True)
        assert relaxation_oracle(o, 3.0, 1.0) == pytest.approx(math.exp(-3), rel=1e-15)

    def test_erfc(self):
        o = FractionalOrders((0.5,))
        assert relaxation_oracle(o, 1.0, 1.0) == pytest.approx(0.4275835761558070, rel=1e-14)

    def test_three_terms(self, three_term):
        for lam, t in [(0.3, 0.2), (7.0, 1.0), (1e4, 2.0)]:
            ref = relaxation_oracle(three_term, lam, t)
            assert abs(relaxation(three_term, lam, t) - ref) <= 1e-8 * ref

    def test_needs_positive_time(self, two_term):
        with pytest.raises(InvalidParams):
            relaxation_oracle(two_term, 1.0, 0.0)


@settings(max_examples=40, deadline=None)
@given(
    z1=st.floats(0.0, 4.0),
    z2=st.floats(0.0, 2.0),
    beta0=st.floats(0.3, 2.5),
    r1=st.floats(0.3, 0.95),
    frac=st.floats(0.1, 0.9),
)
def test_series_and_contour_agree(z1, z2, beta0, r1, frac):
    betas = (r1, r1 * frac)
    p = MLParams(beta0, betas)
    try:
        s = mlf_series(p, MLArguments((-z1, -z2)))
    except NoConvergence:
        assume(False)
    c, est = invert_rows(beta0, betas, np.array([[z1, z2]]))
    # both error estimates must be honest, including series cancellation
    assert abs(s.value - c[0]) <= s.est_abs_error + est[0] + 1e-12


@settings(max_examples=30, deadline=None)
@given(lam=st.floats(1e-3, 1e7), t=st.floats(1e-4, 5.0))
def test_relaxation_in_unit_interval(lam, t):
    o = FractionalOrders((0.9, 0.6, 0.2), (1.0, 0.5, 3.0))
    w = relaxation(o, lam, t)
    assert 0.0 < w <= 1.0
