"""Second-order Volterra filtering and the combined-kernels canceller."""

import numpy as np
import pytest

import filtermix._kernels as K
from filtermix import scenario
from filtermix.combo import sigmoid
from filtermix.volterra import CKCanceller, VolterraFilter, quad_regressor


class TestQuadRegressor:
    def test_ordering_and_length(self):
        phi = quad_regressor([2.0, 3.0, 5.0], 3)
        assert np.array_equal(phi, [4.0, 6.0, 10.0, 9.0, 15.0, 25.0])

    def test_uses_newest_prefix_of_longer_history(self):
        phi = quad_regressor([2.0, 3.0, 99.0], 2)
        assert np.array_equal(phi, [4.0, 6.0, 9.0])

    def test_short_history_rejected(self):
        with pytest.raises(ValueError):
            quad_regressor([1.0, 2.0], 3)


class TestVolterraFilter:
    def test_validation(self):
        with pytest.raises(ValueError):
            VolterraFilter(0, 2, 0.5, 0.5)
        with pytest.raises(ValueError):
            VolterraFilter(4, -1, 0.5, 0.5)
        with pytest.raises(ValueError):
            VolterraFilter(4, 2, 0.0, 0.5)
        with pytest.raises(ValueError):
            VolterraFilter(4, 2, 0.5)  # n2 > 0 needs mu2
        with pytest.raises(ValueError):
            VolterraFilter(4, 2, 0.5, -0.1)

    def test_single_adapt_step_per_kernel_normalization(self):
        vf = VolterraFilter(2, 2, 0.5, 0.25, eps=0.0)
        hist = np.array([1.0, 2.0])
        y, y1, y2 = vf.output(hist)
        assert (y, y1, y2) == (0.0, 0.0, 0.0)
        vf.adapt(hist, 3.0)
        # u1 = [1, 2] (norm 5), phi = [1, 2, 4] (norm 21)
        assert np.allclose(vf.h1, 0.5 * 3.0 * np.array([1.0, 2.0]) / 5.0)
        assert np.allclose(vf.h2, 0.25 * 3.0 * np.array([1.0, 2.0, 4.0]) / 21.0)

    def test_linear_only_mode(self):
        vf = VolterraFilter(3, 0, 0.5)
        assert vf.h2.shape == (0,)
        hist = np.array([1.0, -1.0, 2.0])
        vf.adapt(hist, 1.0)
        y, y1, y2 = vf.output(hist)
        assert y2 == 0.0
        assert y == y1

    def test_identifies_second_order_system(self):
        n1, n2 = 6, 3
        rng = np.random.default_rng(7)
        h1_true = rng.standard_normal(n1) * 0.5
        h2_true = rng.standard_normal(n2 * (n2 + 1) // 2) * 0.3
        vf = VolterraFilter(n1, n2, 0.5, 0.25)
        u = np.zeros(n1)
        for _ in range(6000):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            d = float(h1_true @ u) + float(h2_true @ quad_regressor(u, n2))
            y, _, _ = vf.output(u)
            vf.adapt(u, d - y)
        assert np.linalg.norm(vf.h1 - h1_true) < 1e-3
        assert np.linalg.norm(vf.h2 - h2_true) < 1e-3

    def test_short_history_rejected(self):
        vf = VolterraFilter(4, 2, 0.5, 0.5)
        with pytest.raises(ValueError):
            vf.output(np.ones(3))


def run_echo_path(ck, x, gamma, h, noise, skip_record=0):
    """Drive a canceller through a distorted echo path; return lam2 history."""
    rir = h.shape[0]
    hist = np.zeros(max(ck.n1, ck.n2))
    zline = np.zeros(rir)
    lam2 = []
    for n in range(x.shape[0]):
        xn = x[n]
        zline[1:] = zline[:-1]
        zline[0] = xn + gamma * xn * xn
        hist[1:] = hist[:-1]
        hist[0] = xn
        d = float(h @ zline) + noise[n]
        if n >= skip_record:
            lam2.append(ck.lam2)
        ck.step(hist, d)
    return np.array(lam2)


class TestCKCanceller:
    def test_validation(self):
        with pytest.raises(ValueError):
            CKCanceller(0, 4, 1.0, 0.1, 0.5)
        with pytest.raises(ValueError):
            CKCanceller(4, 0, 1.0, 0.1, 0.5)
        ck = CKCanceller(4, 2, 1.0, 0.1, 0.5)
        with pytest.raises(ValueError):
            ck.step(np.ones(3), 1.0)

    def test_neutral_start_and_pre_update_error(self):
        ck = CKCanceller(4, 2, 1.0, 0.1, 0.5)
        assert ck.lam1 == 0.5
        assert ck.lam2 == 0.5
        y, e = ck.step(np.array([1.0, 2.0, 3.0, 4.0]), 2.5)
        assert y == 0.0
        assert e == 2.5

    def test_quadratic_gate_closes_on_linear_path(self):
        ck = CKCanceller(16, 8, 1.0, 0.1, 0.5, mixer_mu=0.25)
        rng = np.random.default_rng(11)
        x = rng.standard_normal(5000)
        noise = 0.03 * rng.standard_normal(5000)
        h = scenario.exp_decay_rir(1, 8)
        lam2 = run_echo_path(ck, x, 0.0, h, noise)
        assert lam2[-1] < 0.2
        assert np.mean(lam2[-1000:]) < 0.2

    def test_quadratic_gate_opens_on_nonlinear_path(self):
        # the echo path's quadratic part spans n2 lags, so the quadratic
        # kernel can represent it fully and the gate should rail open
        ck = CKCanceller(16, 8, 1.0, 0.1, 0.5, mixer_mu=0.25)
        rng = np.random.default_rng(12)
        x = rng.standard_normal(5000)
        noise = 0.03 * rng.standard_normal(5000)
        h = scenario.exp_decay_rir(1, 8)
        lam2 = run_echo_path(ck, x, 1.0, h, noise)
        assert lam2[-1] > 0.8
        assert np.mean(lam2[-1000:]) > 0.8

    def test_kernel_replication_all_three_tracks(self):
        n, n1, n2, rir = 800, 8, 4, 8
        rng = scenario.run_rng(33, 0)
        x = rng.standard_normal(n)
        e0 = 0.01 * rng.standard_normal(n)
        gamma = np.full(n, 0.5)
        h_a = scenario.exp_decay_rir(33, rir, tag=0)
        h_b = scenario.exp_decay_rir(33, rir, tag=1)
        change = 400
        lo = sigmoid(-4.0)
        sc = 1.0 / (sigmoid(4.0) - lo)
        echo_sq, res_ck, res_lin, res_vf, lam1_out, lam2_out, ok = K.run_echo(
            x, e0, gamma, h_a, h_b, change, n1, n2,
            1.0, 0.1, 0.5, 0.5, 0.25, 1e-8, 0.25, 0.9, 1e-8, 4.0, lo, sc)
        assert ok

        ck = CKCanceller(n1, n2, 1.0, 0.1, 0.5, mixer_mu=0.25)
        from filtermix.combo import Mixer
        from filtermix.filters import NLMS

        lin1, lin2 = NLMS(n1, 1.0), NLMS(n1, 0.1)
        lin_mix = Mixer("cvx-pn-lms", 0.25)
        vf = VolterraFilter(n1, n2, 0.5, 0.25)
        hist = np.zeros(max(n1, n2))
        zline = np.zeros(rir)
        for k in range(n):
            xn = x[k]
            zline[1:] = zline[:-1]
            zline[0] = xn + gamma[k] * xn * xn
            hist[1:] = hist[:-1]
            hist[0] = xn
            h = h_a if k < change else h_b
            echo = float(h @ zline)
            d = echo + e0[k]
            assert echo * echo == pytest.approx(echo_sq[k], rel=1e-12, abs=1e-12)
            # combined-kernels track (pre-update state)
            assert ck.lam1 == pytest.approx(lam1_out[k], abs=1e-9)
            assert ck.lam2 == pytest.approx(lam2_out[k], abs=1e-9)
            y, _ = ck.step(hist, d)
            assert (echo - y) ** 2 == pytest.approx(res_ck[k], rel=1e-9, abs=1e-9)
            # linear-only track: members adapt on own errors,
            # the mixer on the combined error
            u1 = hist[:n1]
            y1, _ = lin1.adapt(u1, d)
            y2, _ = lin2.adapt(u1, d)
            yl = lin_mix.lam * y1 + (1.0 - lin_mix.lam) * y2
            lin_mix.step(d - yl, y1, y2)
            assert (echo - yl) ** 2 == pytest.approx(res_lin[k], rel=1e-9, abs=1e-9)
            # full Volterra track: one shared error
            yf, _, _ = vf.output(hist)
            vf.adapt(hist, d - yf)
            assert (echo - yf) ** 2 == pytest.approx(res_vf[k], rel=1e-9, abs=1e-9)
