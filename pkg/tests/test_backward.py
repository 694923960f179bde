import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erfcx, rgamma

from fractoback.backward import (
    BackwardProblemSpec,
    PrioriBound,
    backward_solve,
    backward_solve_homogeneous,
    conditional_stability_check,
    denominator,
    illposedness_demo,
    random_family,
    roundtrip,
    stability_quotient,
    two_sided_check,
    two_sided_ratios,
)
from fractoback.errors import InvalidParams, PrioriViolation
from fractoback.forward import QuadratureSettings, forward_solve
from fractoback.mlf import FractionalOrders, relaxation_oracle
from fractoback.sources import SeparableSource, ZeroSource
from fractoback.spectral import DiagonalOperator, fractional_norm

FINE = QuadratureSettings(panels=30, low=16, high=24)


@pytest.fixture
def op32():
    return DiagonalOperator.dirichlet1d(32)


class TestDenominator:
    def test_small_argument_limit(self, two_term):
        assert denominator(two_term, 1e-12, 1.0) == pytest.approx(1.0, abs=1e-11)

    def test_erfc_case(self):
        # single order 1/2: D = E_{1/2}(-1) = erfcx(1)
        assert denominator(FractionalOrders((0.5,)), 1.0, 1.0) == pytest.approx(erfcx(1.0), rel=1e-12)

    @pytest.mark.parametrize("lam", [1e4, 1e5, 1e6])
    def test_large_lambda_leading_term(self, two_term, lam):
        lead = rgamma(1 - 0.8) + rgamma(1 - 0.4)
        assert denominator(two_term, lam, 1.0) * lam == pytest.approx(lead, rel=5.0 / lam ** 0.4)

    def test_against_oracle(self, three_term):
        for lam in (0.3, 30.0, 3e3, 3e5):
            ref = relaxation_oracle(three_term, lam, 1.5)
            assert denominator(three_term, lam, 1.5) == pytest.approx(ref, rel=1e-8)

    def test_positive_and_monotone(self, op32, two_term):
        D = denominator(two_term, op32.eigenvalues, 2.0)
        assert np.all((D > 0) & (D <= 1))
        assert np.all(np.diff(D) < 0)

    def test_invalid_T(self, two_term):
        with pytest.raises(InvalidParams):
            denominator(two_term, 1.0, 0.0)


class TestHomogeneous:
    def test_single_mode_inversion(self, op32, two_term):
        D1 = denominator(two_term, 1.0, 1.0)
        res = backward_solve_homogeneous(BackwardProblemSpec(op32, two_term, 1.0, D1 * op32.unit(1)))
        assert np.allclose(res.phi_hat, op32.unit(1), rtol=0, atol=1e-15)

    def test_needs_zero_source(self, op32, two_term):
        spec = BackwardProblemSpec(op32, two_term, 1.0, op32.unit(1),
                                   SeparableSource(op32.unit(1), np.cos))
        with pytest.raises(InvalidParams):
            backward_solve_homogeneous(spec)

    def test_roundtrip_independent_quadrature(self, op32, two_term):
        phi = np.random.default_rng(5).standard_normal(32)
        Phi = forward_solve(op32, two_term, phi, None, [1.0]).final
        res = backward_solve_homogeneous(BackwardProblemSpec(op32, two_term, 1.0, Phi))
        assert np.linalg.norm(res.phi_hat - phi) <= 1e-8 * np.linalg.norm(phi)

    def test_holder_identity(self, op32, two_term):
        Phi = np.random.default_rng(6).standard_normal(32) / np.arange(1, 33) ** 2
        res = backward_solve_homogeneous(BackwardProblemSpec(op32, two_term, 1.0, Phi))
        assert np.sum(res.phi_hat**2) == pytest.approx(np.sum((Phi / res.denominators) ** 2), rel=1e-15)

    def test_amplification_nondecreasing(self, op32, three_term):
        res = backward_solve_homogeneous(BackwardProblemSpec(op32, three_term, 1.0, np.ones(32)))
        assert np.all(np.diff(res.amplification) >= 0)

    def test_spec_validation(self, op32, two_term):
        with pytest.raises(InvalidParams):
            BackwardProblemSpec(op32, two_term, -1.0, np.zeros(32))
        with pytest.raises(InvalidParams):
            BackwardProblemSpec(op32, two_term, 1.0, np.zeros((2, 32)))


class TestWithSource:
    @pytest.fixture
    def source(self):
        g = np.random.default_rng(8).standard_normal(32) / np.arange(1, 33) ** 2
        return SeparableSource(g, lambda t: 1.0 + np.sin(3 * t))

    def test_zero_source_matches_homogeneous(self, op32, two_term):
        Phi = np.random.default_rng(9).standard_normal(32)
        a = backward_solve(BackwardProblemSpec(op32, two_term, 1.0, Phi))
        b = backward_solve_homogeneous(BackwardProblemSpec(op32, two_term, 1.0, Phi))
        assert np.array_equal(a.phi_hat, b.phi_hat)

    def test_data_from_zero_initial_state(self, op32, two_term, source):
        Phi = forward_solve(op32, two_term, np.zeros(32), source, [1.0], FINE).final
        res = backward_solve(BackwardProblemSpec(op32, two_term, 1.0, Phi, source))
        assert np.max(np.abs(res.phi_hat)) <= 1e-8

    def test_full_roundtrip_against_finer_forward(self, op32, two_term, source):
        phi = np.random.default_rng(10).standard_normal(32)
        Phi = forward_solve(op32, two_term, phi, source, [1.0], FINE).final
        res = backward_solve(BackwardProblemSpec(op32, two_term, 1.0, Phi, source))
        assert np.linalg.norm(res.phi_hat - phi) <= 1e-6 * np.linalg.norm(phi)
        again = forward_solve(op32, two_term, res.phi_hat, source, [1.0]).final
        assert np.linalg.norm(again - Phi) <= 1e-8 * np.linalg.norm(Phi)

    def test_linear_in_final_data(self, op32, two_term, source):
        rng = np.random.default_rng(11)
        P1, P2 = rng.standard_normal(32), rng.standard_normal(32)

        def solve(P, f):
            return backward_solve(BackwardProblemSpec(op32, two_term, 1.0, P, f)).phi_hat

        # affine in Phi for fixed f: differences are linear
        lhs = solve(P1 + 2 * P2, source) - solve(np.zeros(32), source)
        rhs = solve(P1, None) + 2 * solve(P2, None)
        assert np.allclose(lhs, rhs, rtol=0, atol=1e-10 * np.abs(rhs).max())

    def test_stability_ratio_reported(self, op32, two_term, source):
        res = backward_solve(BackwardProblemSpec(op32, two_term, 1.0, op32.unit(2), source))
        assert 0 < res.diagnostics["stability_ratio"] < np.inf

    def test_roundtrip_report(self, op32, two_term, source):
        rep = roundtrip(op32, two_term, np.random.default_rng(1).standard_normal(32), source, 1.0)
        assert rep.passed
        assert rep.tables["modes"].columns[:4] == ["k", "lambda_k", "D_k", "inv_D_k"]


class TestIllposedness:
    def test_columns_and_trends(self, op32, two_term):
        rep = illposedness_demo(op32, two_term, 1.0, 0.1)
        t = rep.tables["modes"]
        assert t.columns == ["k", "lambda_k", "norm_Phi", "norm1_Phi", "norm_u0", "inv_D_k"]
        assert rep.passed
        lam = t.column("lambda_k")
        assert np.allclose(t.column("norm1_Phi"), lam**0.1, rtol=1e-14)

    def test_slope(self, op32, three_term):
        rep = illposedness_demo(op32, three_term, 1.0, 0.1)
        assert rep.constants["slope_inv_D_vs_lambda"] == pytest.approx(1.0, abs=0.05)

    def test_noise_amplification(self, op32, two_term):
        rep = illposedness_demo(op32, two_term, 1.0, 0.1, noise=1e-6)
        t = rep.tables["modes"]
        assert np.allclose(t.column("noise_error"), 1e-6 * t.column("inv_D_k"))

    def test_range_checked(self, op32, two_term):
        with pytest.raises(InvalidParams):
            illposedness_demo(op32, two_term, 1.0, 0.1, k_range=(8, 40))


class TestTwoSided:
    def test_ratio_bounds_from_denominators(self, op32, two_term):
        phis = random_family(32, 20, 0)
        r = two_sided_ratios(op32, two_term, 1.0, phis)
        lD = op32.eigenvalues * denominator(two_term, op32.eigenvalues, 1.0)
        assert np.all(r >= lD.min() * (1 - 1e-14)) and np.all(r <= lD.max() * (1 + 1e-14))

    def test_interval_stable(self, two_term):
        rep = two_sided_check(two_term, 1.0, 32, 100, seed=123)
        assert rep.passed, rep.constants


class TestConditionalStability:
    def test_single_mode_closed_form(self, op32, two_term):
        eps = 0.5
        D1 = denominator(two_term, 1.0, 1.0)
        q = stability_quotient(op32, two_term, 1.0, op32.unit(1), None, PrioriBound(eps, 1.0))
        assert q == pytest.approx(D1 ** (-eps / (1 + eps)), rel=1e-12)

    def test_high_modes_bounded(self, op32, two_term):
        eps = 0.5
        qs = [stability_quotient(op32, two_term, 1.0, op32.unit(k), None,
                                 PrioriBound(eps, k ** (2 * eps))) for k in (4, 8, 16, 32)]
        assert max(qs) / min(qs) < 1.5

    def test_violation(self, op32, two_term):
        with pytest.raises(PrioriViolation):
            PrioriBound(0.5, 0.1).check(op32, op32.unit(3))
        with pytest.raises(InvalidParams):
            PrioriBound(0.0, 1.0)

    def test_family_check(self, op32, two_term):
        rng = np.random.default_rng(2)
        cases = []
        for _ in range(10):
            phi = rng.standard_normal(32)
            f = SeparableSource(0.1 * rng.standard_normal(32) / np.arange(1, 33) ** 2, np.exp)
            cases.append((phi, f, float(fractional_norm(op32, phi, 0.5))))
        rep = conditional_stability_check(op32, two_term, 1.0, 0.5, cases, scales=[1e-3, 1e3])
        assert rep.flags["Q_finite"] and rep.flags["scaling_invariant"]

    def test_zero_source_family(self, op32, two_term):
        cases = [(op32.unit(k), ZeroSource(32), float(k)) for k in (1, 2, 3, 4)]
        rep = conditional_stability_check(op32, two_term, 1.0, 0.5, cases, scales=[10.0])
        assert rep.flags["scaling_invariant"]


@settings(max_examples=20, deadline=None)
@given(s=st.floats(1e-3, 1e3), k=st.integers(1, 32))
def test_quotient_homogeneous(s, k):
    op = DiagonalOperator.dirichlet1d(32)
    o = FractionalOrders((0.8, 0.4), (1.0, 1.0))
    phi = op.unit(k) + 0.5 * op.unit(1)
    B0 = float(fractional_norm(op, phi, 0.5))
    q1 = stability_quotient(op, o, 1.0, phi, None, PrioriBound(0.5, B0))
    qs = stability_quotient(op, o, 1.0, s * phi, None, PrioriBound(0.5, s * B0))
    assert qs == pytest.approx(q1, rel=1e-12)
