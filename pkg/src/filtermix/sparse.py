"""Block-wise output shrinkage for sparse plants.

A single base filter of length M is split into contiguous blocks; each
block's partial output y_q is scaled by its own factor lambda_q in [0, 1]
before summation, y = sum_q lambda_q y_q.  Each lambda_q is adapted as a
power-normalized convex combination between y_q and a virtual branch that
always outputs zero, driven by the global shrunk error e = d - y.  Blocks
whose true coefficients are (near) zero drive their lambda_q toward 0,
trading a little bias for a large variance reduction on sparse plants.

The base filter adapts with the unbiased error d - sum_q y_q so that
shrinkage biases only the output path, never the weight estimates.

The companion low-complexity approach for sparse plants — a plain convex
combination of an NLMS and a zero-attracting NLMS — needs no machinery
beyond ``filters.ZANLMS`` and the two-filter combination; the ensemble
wrappers in ``scenario`` cover it.
"""

import numpy as np

from .combo import scaled_sigmoid, sigmoid


def block_bounds(m, n_blocks):
    """Start offsets of each block; the last block absorbs any remainder."""
    if not 1 <= n_blocks <= m:
        raise ValueError(f"block count must lie in [1, {m}], got {n_blocks}")
    base = m // n_blocks
    bounds = np.arange(0, n_blocks + 1, dtype=np.int64) * base
    bounds[n_blocks] = m
    return bounds


class BlockShrink:
    """Normalized LMS base filter with per-block output shrinkage.

    ``pin_lambdas`` freezes every lambda_q at the given value and disables
    shrinkage adaptation; with 1.0 the filter behaves exactly like the
    plain base filter.
    """

    def __init__(self, m, n_blocks, mu, mu_a, eps=1e-8, eta=0.9,
                 mixer_eps=1e-8, a_max=4.0, pin_lambdas=None):
        if mu <= 0.0 or mu_a <= 0.0:
            raise ValueError("step sizes must be positive")
        self.m = m
        self.bounds = block_bounds(m, n_blocks)
        self.n_blocks = n_blocks
        self.mu = float(mu)
        self.mu_a = float(mu_a)
        self.eps = float(eps)
        self.eta = float(eta)
        self.mixer_eps = float(mixer_eps)
        self.a_max = float(a_max)
        self.w = np.zeros(m)
        self.a_q = np.zeros(n_blocks)
        self.p_q = np.zeros(n_blocks)
        self.pinned = pin_lambdas is not None
        if self.pinned:
            pin = np.asarray(pin_lambdas, dtype=float)
            self.lam_q = np.broadcast_to(pin, (n_blocks,)).copy()
        else:
            self.lam_q = np.full(n_blocks, 0.5)

    def shrunk_weights(self):
        """The effective coefficient vector lambda_q * w per block."""
        out = self.w.copy()
        for q in range(self.n_blocks):
            out[self.bounds[q]: self.bounds[q + 1]] *= self.lam_q[q]
        return out

    def output(self, u):
        """(shrunk output y, per-block partial outputs y_q)."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.m,):
            raise ValueError(f"expected regressor of shape ({self.m},), got {u.shape}")
        y_q = np.array([float(self.w[self.bounds[q]: self.bounds[q + 1]]
                              @ u[self.bounds[q]: self.bounds[q + 1]])
                        for q in range(self.n_blocks)])
        return float(self.lam_q @ y_q), y_q

    def step(self, u, d):
        """One sample; returns (y, e) with the shrunk output's error."""
        u = np.asarray(u, dtype=float)
        y, y_q = self.output(u)
        e = d - y
        # base filter: plain normalized update with the unbiased error,
        # written exactly like filters.NLMS.adapt so pinned lambdas
        # reproduce the plain filter bit for bit
        e_unb = d - float(u @ self.w)
        denom = self.eps + float(u @ u)
        self.w = self.w + self.mu * e_unb * u / denom
        if not self.pinned:
            for q in range(self.n_blocks):
                diff = y_q[q]
                self.p_q[q] = self.eta * self.p_q[q] + (1.0 - self.eta) * diff * diff
                s = sigmoid(self.a_q[q])
                g = s * (1.0 - s)
                step = self.mu_a / (self.mixer_eps + self.p_q[q]) * g * e * diff
                self.a_q[q] = min(max(self.a_q[q] + step, -self.a_max), self.a_max)
                self.lam_q[q] = scaled_sigmoid(self.a_q[q], self.a_max)
        return y, e
