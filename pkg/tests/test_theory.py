"""Closed-form tracking results: optimal tuning, cross-EMSE, regimes.

High-precision reference values were computed independently with mpmath
and frozen here as literals.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filtermix import theory

WHITE7 = theory.TrackingSpec(1e-2, np.eye(7) / 7, 1e-8 * np.eye(7))


def spec_with_trq(trq, m=7, sigma_v2=1e-2):
    return theory.TrackingSpec(sigma_v2, np.eye(m) / m, (trq / m) * np.eye(m))


class TestTrackingSpec:
    def test_traces(self):
        spec = spec_with_trq(1e-5)
        assert spec.m == 7
        assert math.isclose(spec.tr_r, 1.0, rel_tol=1e-12)
        assert math.isclose(spec.tr_q, 1e-5, rel_tol=1e-12)
        assert math.isclose(spec.tr_qr, 1e-5 / 7, rel_tol=1e-12)

    def test_rejects_asymmetric_r(self):
        r = np.eye(3)
        r[0, 1] = 0.5
        with pytest.raises(ValueError):
            theory.TrackingSpec(1e-2, r, np.eye(3))

    def test_rejects_negative_noise(self):
        with pytest.raises(ValueError):
            theory.TrackingSpec(-1.0, np.eye(2), np.eye(2))


class TestOptimalParams:
    def test_lms_optimum_literals(self):
        # mpmath: sqrt(1e-5 / 1e-2) and sqrt(1e-2 * 1e-5)
        opt = theory.optimal_params(spec_with_trq(1e-5))
        assert opt.mu_opt == pytest.approx(0.03162277660168379, rel=1e-14)
        assert opt.emse_lms == pytest.approx(3.1622776601683794e-4, rel=1e-14)

    def test_rls_optimum_literals(self):
        # mpmath: sqrt(1e-8 / (1e-2 * 7)) and sqrt(1e-2 * 7 * 1e-8)
        opt = theory.optimal_params(WHITE7)
        assert opt.beta_opt == pytest.approx(3.779644730092272e-4, rel=1e-14)
        assert opt.emse_rls == pytest.approx(2.6457513110645906e-5, rel=1e-14)

    def test_optimum_minimizes_lms_emse(self):
        spec = spec_with_trq(1e-6)
        opt = theory.optimal_params(spec)
        z_star = theory.lms_emse(opt.mu_opt, spec)
        for factor in (0.5, 0.9, 1.1, 2.0):
            assert theory.lms_emse(opt.mu_opt * factor, spec) > z_star

    def test_optimum_minimizes_rls_emse(self):
        opt = theory.optimal_params(WHITE7)
        z_star = theory.rls_emse(opt.beta_opt, WHITE7)
        for factor in (0.5, 0.9, 1.1, 2.0):
            assert theory.rls_emse(opt.beta_opt * factor, WHITE7) > z_star

    def test_stationary_plant_rejected(self):
        spec = theory.TrackingSpec(1e-2, np.eye(3), np.zeros((3, 3)))
        with pytest.raises(ValueError):
            theory.optimal_params(spec)


class TestEmseForms:
    def test_lms_emse_value(self):
        spec = spec_with_trq(1e-5)
        # 0.5 * (mu * 1e-2 * 1 + 1e-5 / mu) at mu = 0.1
        assert theory.lms_emse(0.1, spec) == pytest.approx(5.5e-4, rel=1e-12)

    def test_rls_emse_value(self):
        # 0.5 * (beta * 1e-2 * 7 + 1e-8 / beta) at beta = 1e-3
        assert theory.rls_emse(1e-3, WHITE7) == pytest.approx(4e-5, rel=1e-12)

    def test_parameter_validation(self):
        spec = spec_with_trq(1e-5)
        with pytest.raises(ValueError):
            theory.lms_emse(0.0, spec)
        with pytest.raises(ValueError):
            theory.rls_emse(1.5, WHITE7)


class TestCrossEmse:
    def test_equal_lms_pair_recovers_single(self):
        spec = spec_with_trq(1e-5)
        mu = 0.05
        z = theory.cross_emse(("lms", mu), ("lms", mu), spec)
        assert z == pytest.approx(theory.lms_emse(mu, spec), rel=1e-12)

    def test_equal_rls_pair_recovers_single(self):
        beta = 1e-3
        z = theory.cross_emse(("rls", beta), ("rls", beta), WHITE7)
        assert z == pytest.approx(theory.rls_emse(beta, WHITE7), rel=1e-12)

    def test_mixed_pair_order_insensitive(self):
        z_a = theory.cross_emse(("lms", 0.05), ("rls", 1e-3), WHITE7)
        z_b = theory.cross_emse(("rls", 1e-3), ("lms", 0.05), WHITE7)
        assert z_a == pytest.approx(z_b, rel=1e-13)

    def test_mixed_pair_white_closed_form(self):
        # With R = r*I the matrix form collapses to
        # mu*beta*sigma_v2*M*r/(mu*r + beta) + Tr{Q}*r/(mu*r + beta).
        m, r, trq = 7, 1.0 / 7, 1e-5
        spec = spec_with_trq(trq, m=m)
        mu, beta = 0.05, 1e-3
        expected = (mu * beta * 1e-2 * m * r + trq * r) / (mu * r + beta)
        z = theory.cross_emse(("lms", mu), ("rls", beta), spec)
        assert z == pytest.approx(expected, rel=1e-12)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            theory.cross_emse(("nlms", 0.1), ("lms", 0.1), WHITE7)

    @given(mu1=st.floats(1e-4, 1.0), mu2=st.floats(1e-4, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_lms_cross_satisfies_cauchy_schwartz(self, mu1, mu2):
        spec = spec_with_trq(1e-5)
        z1 = theory.lms_emse(mu1, spec)
        z2 = theory.lms_emse(mu2, spec)
        z12 = theory.cross_emse(("lms", mu1), ("lms", mu2), spec)
        assert z12 * z12 <= z1 * z2 * (1 + 1e-12)


class TestCombination:
    def test_combined_emse_endpoints(self):
        assert theory.combined_emse(2.0, 3.0, 1.0, 1.0) == pytest.approx(2.0)
        assert theory.combined_emse(2.0, 3.0, 1.0, 0.0) == pytest.approx(3.0)

    def test_regimes(self):
        assert theory.classify_regime(1.0, 3.0, 1.5) == "case1"
        assert theory.classify_regime(3.0, 1.0, 1.5) == "case2"
        assert theory.classify_regime(1.0, 1.2, 0.9) == "case3"
        assert theory.classify_regime(1.0, 1.0, 1.0) == "case4"

    def test_case4_is_relative(self):
        z = 1e-9
        assert theory.classify_regime(z, z * (1 + 1e-14), z) == "case4"

    def test_cauchy_schwartz_violation_rejected(self):
        with pytest.raises(ValueError):
            theory.classify_regime(1.0, 1.0, 1.1)
        with pytest.raises(ValueError):
            theory.optimal_lambda(1.0, 1.0, -1.1)

    def test_optimal_lambda_interior(self):
        # dz1 = 0.1, dz2 = 0.3 -> lam = 0.75 in both modes
        lam = theory.optimal_lambda(1.0, 1.2, 0.9, mode="affine")
        assert lam == pytest.approx(0.75, rel=1e-12)
        assert theory.optimal_lambda(1.0, 1.2, 0.9, mode="convex") == pytest.approx(0.75)

    def test_optimal_lambda_convex_clamps(self):
        # case1: affine optimum > 1, convex pins to 1
        assert theory.optimal_lambda(1.0, 3.0, 1.5, mode="affine") > 1.0
        assert theory.optimal_lambda(1.0, 3.0, 1.5, mode="convex") == 1.0
        assert theory.optimal_lambda(3.0, 1.0, 1.5, mode="convex") == 0.0
        assert theory.optimal_emse(1.0, 3.0, 1.5, mode="convex") == 1.0
        assert theory.optimal_emse(3.0, 1.0, 1.5, mode="convex") == 1.0

    def test_case4_lambda_nan_emse_z1(self):
        assert math.isnan(theory.optimal_lambda(1.0, 1.0, 1.0))
        assert theory.optimal_emse(1.0, 1.0, 1.0) == 1.0

    def test_optimal_emse_beats_both_members_interior(self):
        z = theory.optimal_emse(1.0, 1.2, 0.9, mode="convex")
        assert z < 1.0 and z < 1.2

    def test_near_equal_steps_affine_literals(self):
        # mpmath oracle for mu2 = mu1*(1 + 1e-4): the affine optimum runs
        # far outside [0, 1] yet the combined EMSE stays finite and small.
        spec = theory.TrackingSpec(1e-2, np.array([[1.0]]), np.array([[1e-5]]))
        mu1 = 0.01
        mu2 = mu1 * (1 + 1e-4)
        z1 = theory.lms_emse(mu1, spec)
        z2 = theory.lms_emse(mu2, spec)
        z12 = theory.cross_emse(("lms", mu1), ("lms", mu2), spec)
        lam = theory.optimal_lambda(z1, z2, z12, mode="affine")
        zopt = theory.optimal_emse(z1, z2, z12, mode="affine")
        # float64 evaluation of the z-differences carries cancellation, so
        # the lambda tolerance is loose while the EMSE one is tight
        assert lam == pytest.approx(-8181.561976709303, rel=1e-6)
        assert zopt == pytest.approx(0.0003659015604460184, rel=1e-8)

    @given(z1=st.floats(1e-8, 1e2), z2=st.floats(1e-8, 1e2),
           t=st.floats(-0.999, 0.999), lam_probe=st.floats(-5.0, 5.0))
    @settings(max_examples=200, deadline=None)
    def test_affine_optimum_is_global_minimum(self, z1, z2, t, lam_probe):
        z12 = t * math.sqrt(z1 * z2)
        lam = theory.optimal_lambda(z1, z2, z12, mode="affine")
        if math.isnan(lam):
            return
        z_star = theory.combined_emse(z1, z2, z12, lam)
        z_probe = theory.combined_emse(z1, z2, z12, lam_probe)
        assert z_star <= z_probe + 1e-12 * max(1.0, abs(z_probe))

    @given(z1=st.floats(1e-8, 1e2), z2=st.floats(1e-8, 1e2),
           t=st.floats(-0.999, 0.999))
    @settings(max_examples=200, deadline=None)
    def test_convex_optimum_never_worse_than_best_member(self, z1, z2, t):
        z12 = t * math.sqrt(z1 * z2)
        z = theory.optimal_emse(z1, z2, z12, mode="convex")
        assert z <= min(z1, z2) * (1 + 1e-12)


class TestNsd:
    def test_three_db_literal(self):
        assert theory.nsd(2.0, 1.0) == pytest.approx(3.010299956639812, rel=1e-14)

    def test_reference_is_zero(self):
        assert theory.nsd(5e-4, 5e-4) == 0.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            theory.nsd(0.0, 1.0)
