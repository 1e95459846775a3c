"""Block-wise output shrinkage for sparse plants."""

import numpy as np
import pytest

import filtermix._kernels as K
from filtermix import scenario
from filtermix.combo import sigmoid
from filtermix.filters import NLMS
from filtermix.sparse import BlockShrink, block_bounds


class TestBlockBounds:
    def test_even_split(self):
        assert np.array_equal(block_bounds(8, 4), [0, 2, 4, 6, 8])

    def test_last_block_absorbs_remainder(self):
        assert np.array_equal(block_bounds(10, 3), [0, 3, 6, 10])

    def test_single_block(self):
        assert np.array_equal(block_bounds(5, 1), [0, 5])

    def test_validation(self):
        with pytest.raises(ValueError):
            block_bounds(4, 0)
        with pytest.raises(ValueError):
            block_bounds(4, 5)


def drive(filt, w_o, n_samples, noise, seed):
    rng = np.random.default_rng(seed)
    m = w_o.shape[0]
    u = np.zeros(m)
    for _ in range(n_samples):
        u[1:] = u[:-1]
        u[0] = rng.standard_normal()
        d = float(w_o @ u) + noise * rng.standard_normal()
        filt.step(u, d)


class TestBlockShrink:
    def test_validation(self):
        with pytest.raises(ValueError):
            BlockShrink(8, 2, 0.0, 1.0)
        with pytest.raises(ValueError):
            BlockShrink(8, 2, 0.5, 1.0).step(np.ones(9), 1.0)

    def test_pinned_unit_lambdas_reproduce_plain_filter_bitwise(self):
        rng = np.random.default_rng(0)
        m = 32
        bs = BlockShrink(m, 4, 0.5, 1.0, pin_lambdas=1.0)
        nl = NLMS(m, 0.5)
        w_o = scenario.sparse_plant(5, m, 3)
        u = np.zeros(m)
        for _ in range(2000):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            d = float(w_o @ u) + 0.01 * rng.standard_normal()
            bs.step(u, d)
            nl.adapt(u, d)
        assert np.array_equal(bs.w, nl.w)
        assert np.array_equal(bs.lam_q, np.ones(4))

    def test_shrinkage_gates_inactive_blocks(self):
        m, nq = 64, 8
        w_o = np.zeros(m)
        w_o[2] = 0.8
        w_o[5] = -0.6  # active taps only in block 0
        bs = BlockShrink(m, nq, 0.5, 1.0)
        drive(bs, w_o, 8000, noise=0.05, seed=3)
        assert bs.lam_q[0] > 0.9
        assert np.all(bs.lam_q[1:] < 0.2)

    def test_shrunk_weights_scale_blocks(self):
        bs = BlockShrink(4, 2, 0.5, 1.0, pin_lambdas=np.array([0.5, 2.0]))
        bs.w = np.array([1.0, 1.0, 1.0, 1.0])
        assert np.allclose(bs.shrunk_weights(), [0.5, 0.5, 2.0, 2.0])

    def test_shrinkage_beats_plain_filter_on_sparse_plant(self):
        m, nq = 64, 8
        w_o = scenario.sparse_plant(11, m, 2)
        bs = BlockShrink(m, nq, 0.5, 1.0)
        nl = NLMS(m, 0.5)
        rng = np.random.default_rng(4)
        u = np.zeros(m)
        msd_bs = msd_nl = 0.0
        for k in range(12000):
            u[1:] = u[:-1]
            u[0] = rng.standard_normal()
            d = float(w_o @ u) + 0.1 * rng.standard_normal()
            bs.step(u, d)
            nl.adapt(u, d)
            if k >= 9000:
                msd_bs += float(np.sum((w_o - bs.shrunk_weights()) ** 2))
                msd_nl += float(np.sum((w_o - nl.w) ** 2))
        assert msd_bs < 0.5 * msd_nl

    def test_kernel_replication(self):
        n, m, nq = 1200, 24, 4
        rng = scenario.run_rng(21, 0)
        x = rng.standard_normal(n)
        v = 0.05 * rng.standard_normal(n)
        w_o = scenario.sparse_plant(21, m, 2)
        w_new = scenario.sparse_plant(21, m, 6, tag=1)
        bounds = block_bounds(m, nq)
        lo = sigmoid(-4.0)
        sc = 1.0 / (sigmoid(4.0) - lo)
        msd, e_sq, ok = K.run_blockwise(
            x, v, w_o, np.array([600], dtype=np.int64), w_new[None, :],
            bounds, 0.5, 1e-8, 1.0, 0.9, 1e-8, 4.0, lo, sc, 100)
        assert ok
        bs = BlockShrink(m, nq, 0.5, 1.0)
        u = np.zeros(m)
        wo = w_o.copy()
        for k in range(n):
            if k == 600:
                wo = w_new.copy()
            u[1:] = u[:-1]
            u[0] = x[k]
            d = float(wo @ u) + v[k]
            if k % 100 == 0:
                dev = wo - bs.shrunk_weights()
                assert float(dev @ dev) == pytest.approx(msd[k // 100], abs=1e-10)
            _, e = bs.step(u, d)
            assert e * e == pytest.approx(e_sq[k], abs=1e-9)
