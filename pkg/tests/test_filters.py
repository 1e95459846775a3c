"""Component adaptive filters: contracts, updates, and edge cases."""

import numpy as np
import pytest

from filtermix.filters import LMS, NLMS, RLS, ZANLMS


def identify(filt, w_o, n_samples, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    m = w_o.shape[0]
    u = np.zeros(m)
    for _ in range(n_samples):
        u[1:] = u[:-1]
        u[0] = rng.standard_normal()
        d = float(w_o @ u) + noise * rng.standard_normal()
        filt.adapt(u, d)
    return filt


class TestContracts:
    def test_zero_initial_weights_and_prediction(self):
        f = LMS(4, 0.1)
        assert np.array_equal(f.w, np.zeros(4))
        assert f.predict(np.ones(4)) == 0.0

    def test_adapt_returns_pre_update_output_and_error(self):
        f = LMS(2, 0.5)
        y, e = f.adapt(np.array([1.0, 2.0]), 1.0)
        assert y == 0.0 and e == 1.0
        assert np.allclose(f.w, [0.5, 1.0])

    def test_predict_shape_check(self):
        with pytest.raises(ValueError):
            LMS(3, 0.1).predict(np.ones(4))

    def test_constructor_validation(self):
        with pytest.raises(ValueError):
            LMS(0, 0.1)
        with pytest.raises(ValueError):
            LMS(3, 0.0)
        with pytest.raises(ValueError):
            NLMS(3, 0.5, eps=-1.0)
        with pytest.raises(ValueError):
            ZANLMS(3, 0.5, rho=-1e-4)
        with pytest.raises(ValueError):
            RLS(3, 1.0)
        with pytest.raises(ValueError):
            RLS(3, 1e-3, delta=0.0)


class TestIdentification:
    def test_each_filter_identifies_a_plant(self):
        w_o = np.array([0.5, -0.3, 0.2, 0.1, -0.05])
        for filt in (LMS(5, 0.05), NLMS(5, 0.5), ZANLMS(5, 0.5, rho=1e-6),
                     RLS(5, 1e-3)):
            identify(filt, w_o, 3000)
            assert np.linalg.norm(filt.w - w_o) < 1e-3, type(filt).__name__


class TestNlms:
    def test_update_is_normalized(self):
        f = NLMS(2, 1.0, eps=0.0)
        u = np.array([3.0, 4.0])  # ||u||^2 = 25
        f.adapt(u, 5.0)
        assert np.allclose(f.w, 5.0 * u / 25.0)

    def test_zero_regressor_with_zero_eps_raises(self):
        f = NLMS(3, 0.5, eps=0.0)
        with pytest.raises(ZeroDivisionError):
            f.adapt(np.zeros(3), 1.0)

    def test_zero_regressor_with_default_eps_is_safe(self):
        f = NLMS(3, 0.5)
        f.adapt(np.zeros(3), 1.0)
        assert np.array_equal(f.w, np.zeros(3))


class TestZeroAttracting:
    def test_rho_zero_is_bitwise_nlms(self):
        rng = np.random.default_rng(3)
        za = ZANLMS(6, 0.5, rho=0.0)
        nl = NLMS(6, 0.5)
        u = np.zeros(6)
        for _ in range(500):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            d = rng.standard_normal()
            za.adapt(u, d)
            nl.adapt(u, d)
        assert np.array_equal(za.w, nl.w)

    def test_exactly_zero_weights_are_not_attracted(self):
        f = ZANLMS(4, 0.5, rho=1e-3)
        u = np.array([1.0, 0.0, 0.0, 0.0])
        f.adapt(u, 1.0)  # only w[0] receives a gradient
        assert f.w[0] != 0.0
        assert np.array_equal(f.w[1:], np.zeros(3))

    def test_attraction_shrinks_toward_zero(self):
        f = ZANLMS(2, 0.5, rho=1e-2)
        f.w = np.array([0.5, -0.5])
        u = np.zeros(2)
        f.adapt(u, 0.0)  # no gradient, pure attraction
        assert np.allclose(f.w, [0.5 - 1e-2, -0.5 + 1e-2])

    def test_sparser_plant_estimate_than_nlms(self):
        rng = np.random.default_rng(9)
        m = 64
        w_o = np.zeros(m)
        w_o[[3, 17, 40]] = [0.7, -0.5, 0.3]
        za = ZANLMS(m, 0.5, rho=5e-5)
        nl = NLMS(m, 0.5)
        u = np.zeros(m)
        for _ in range(20000):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            d = float(w_o @ u) + 0.01 * rng.standard_normal()
            za.adapt(u, d)
            nl.adapt(u, d)
        inactive = np.ones(m, dtype=bool)
        inactive[[3, 17, 40]] = False
        assert (np.linalg.norm(za.w[inactive])
                < 0.5 * np.linalg.norm(nl.w[inactive]))


class TestRls:
    def test_inverse_correlation_initialization(self):
        f = RLS(3, 1e-3, delta=1e-2)
        assert np.array_equal(f.P, np.eye(3) / 1e-2)
        assert f.forgetting == 1.0 - 1e-3

    def test_p_stays_symmetric(self):
        rng = np.random.default_rng(5)
        f = RLS(4, 5e-3)
        u = np.zeros(4)
        for _ in range(1000):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            f.adapt(u, rng.standard_normal())
            assert np.array_equal(f.P, f.P.T)
        assert np.all(np.linalg.eigvalsh(f.P) > 0)

    def test_tracks_faster_than_slow_lms_after_change(self):
        # cumulative squared deviation while both filters re-track a plant
        # sign flip; after full reconvergence LMS would win on steady noise
        rng = np.random.default_rng(11)
        m = 5
        w_o = rng.standard_normal(m)
        rls = RLS(m, 2e-2)
        lms = LMS(m, 5e-3)
        u = np.zeros(m)
        dev_rls = dev_lms = 0.0
        for n in range(3600):
            if n == 3000:
                w_o = -w_o
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            d = float(w_o @ u) + 1e-2 * rng.standard_normal()
            rls.adapt(u, d)
            lms.adapt(u, d)
            if n >= 3000:
                dev_rls += float(np.sum((rls.w - w_o) ** 2))
                dev_lms += float(np.sum((lms.w - w_o) ** 2))
        assert dev_rls < 0.5 * dev_lms
