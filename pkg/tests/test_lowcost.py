"""Reduced-cost difference-filter combination and coefficient quantization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filtermix.combo import Mixer
from filtermix.filters import LMS
from filtermix.lowcost import DiffCombo, quantize, reduced_width_multiplies


class TestQuantize:
    def test_rejects_nonpositive_bits(self):
        with pytest.raises(ValueError):
            quantize(0.5, 0)

    def test_grid_examples(self):
        assert quantize(0.3, 2) == 0.25          # nearest multiple of 0.25
        assert quantize(0.375, 2) == 0.5         # tie rounds half-up
        assert quantize(-0.375, 2) == -0.25      # half-up means toward +inf
        assert quantize(0.1, 4) == pytest.approx(0.125)

    def test_saturation(self):
        assert quantize(2.0, 2, sat=1.0) == 1.0
        assert quantize(-7.5, 2, sat=1.0) == -1.0

    def test_exact_grid_points_are_fixed(self):
        x = np.array([-0.75, -0.25, 0.0, 0.5, 1.0])
        assert np.array_equal(quantize(x, 2), x)

    @given(st.floats(-8.0, 8.0), st.integers(1, 30))
    @settings(max_examples=200, deadline=None)
    def test_idempotent_and_on_grid(self, x, bits):
        q = quantize(x, bits, sat=4.0)
        assert float(quantize(q, bits, sat=4.0)) == float(q)
        assert abs(q) <= 4.0
        scaled = float(q) * 2.0 ** bits
        assert scaled == np.floor(scaled)

    @given(st.floats(-0.9, 0.9))
    @settings(max_examples=100, deadline=None)
    def test_rounding_error_bounded_by_half_step(self, x):
        bits = 8
        assert abs(float(quantize(x, bits)) - x) <= 2.0 ** (-bits) / 2 + 1e-15

    def test_multiply_count(self):
        assert reduced_width_multiplies(7) == 14


class TestDiffCombo:
    def test_validation(self):
        with pytest.raises(ValueError):
            DiffCombo(0, 0.1, 0.01)
        with pytest.raises(ValueError):
            DiffCombo(4, 0.0, 0.01)
        with pytest.raises(ValueError):
            DiffCombo(4, 0.1, 0.01).step(np.ones(3), 1.0)

    def test_default_mixer(self):
        dc = DiffCombo(4, 0.1, 0.01)
        assert dc.mixer.rule == "cvx-pn-lms"
        assert dc.w2.shape == (4,)

    def test_matches_directly_adapted_pair(self):
        # the recursion is algebraically identical to running two LMS
        # filters; at full precision the trajectories must agree to
        # rounding error even over thousands of steps
        rng = np.random.default_rng(7)
        m = 8
        w_o = rng.standard_normal(m)
        dc = DiffCombo(m, 0.05, 0.01)
        f1, f2 = LMS(m, 0.05), LMS(m, 0.01)
        u = np.zeros(m)
        for _ in range(5000):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            d = float(w_o @ u) + 0.05 * rng.standard_normal()
            e1d = d - f1.predict(u)
            e2d = d - f2.predict(u)
            e1, e2, _ = dc.step(u, d)
            f1.adapt(u, d)
            f2.adapt(u, d)
            assert e1 == e1d  # w1 path is the same arithmetic, bit for bit
            assert e2 == pytest.approx(e2d, abs=1e-12)
        assert np.allclose(dc.w2, f2.w, atol=1e-12)
        assert dc.sat_count == 0

    def test_combined_error_uses_pre_update_lambda(self):
        dc = DiffCombo(2, 0.1, 0.01)
        e1, e2, e = dc.step(np.array([1.0, 0.0]), 1.0)
        assert e == pytest.approx(0.5 * e1 + 0.5 * e2)

    def test_quantized_difference_stays_on_grid(self):
        rng = np.random.default_rng(3)
        m = 6
        bits = 8
        dc = DiffCombo(m, 0.05, 0.01, bits=bits, sat=1.0)
        w_o = rng.standard_normal(m)
        u = np.zeros(m)
        for _ in range(500):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            dc.step(u, float(w_o @ u))
            scaled = dc.dw2 * 2.0 ** bits
            assert np.array_equal(scaled, np.floor(scaled))
            assert np.all(np.abs(dc.dw2) <= 1.0)

    def test_tiny_saturation_is_counted_and_respected(self):
        rng = np.random.default_rng(4)
        m = 4
        dc = DiffCombo(m, 0.2, 0.01, bits=10, sat=1e-3)
        w_o = np.array([1.0, -1.0, 0.5, -0.5])
        u = np.zeros(m)
        for _ in range(300):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            dc.step(u, float(w_o @ u))
        assert dc.sat_count > 0
        assert np.all(np.abs(dc.dw2) <= 1e-3)

    def test_coarse_quantization_still_tracks_plant(self):
        rng = np.random.default_rng(5)
        m = 8
        w_o = rng.standard_normal(m)
        w_o /= np.linalg.norm(w_o)
        dc = DiffCombo(m, 0.1, 0.01, bits=12, sat=1.0)
        u = np.zeros(m)
        for _ in range(20000):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            dc.step(u, float(w_o @ u) + 0.01 * rng.standard_normal())
        assert np.linalg.norm(dc.w2 - w_o) < 0.05
        assert np.linalg.norm(dc.w1 - w_o) < 0.2
