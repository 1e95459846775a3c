"""Second-order Volterra filtering and the combined-kernels canceller.

A second-order Volterra filter adds to the linear convolution a quadratic
term over all ordered input products:

    y(n) = sum_i h1_i u(n-i) + sum_{i<=j} h2_{i,j} u(n-i) u(n-j)

The quadratic kernel is stored upper-triangularly, n2*(n2+1)/2
coefficients, in row-major (i, j >= i) order.  Input histories are passed
newest-first: ``history[0]`` is u(n).

``CKCanceller`` mixes two linear kernels (fast/slow) through lambda1 and
gates one quadratic kernel against an all-zeros, never-adapted branch
through lambda2:

    y = lambda1*y_l1 + (1-lambda1)*y_l2 + lambda2*y_q

Each adaptive kernel uses an error built from its own output plus the
combined output of the other order (the linear kernels see d - y_li -
lambda2*y_q; the quadratic kernel sees d - y_q - combined linear), while
both mixers adapt with the global error via the power-normalized convex
rule.  When the echo path is linear, lambda2 falls toward 0 and the
canceller pays no quadratic misadjustment; when distortion dominates,
lambda2 rises toward 1 and the quadratic kernel is fully engaged.
"""

import numpy as np

from .combo import Mixer


def quad_regressor(history, n2):
    """Upper-triangular products u(n-i)u(n-j), i<=j<n2, newest-first order."""
    history = np.asarray(history, dtype=float)
    if history.shape[0] < n2:
        raise ValueError(f"need {n2} history samples, got {history.shape[0]}")
    idx_i, idx_j = np.triu_indices(n2)
    u = history[:n2]
    return u[idx_i] * u[idx_j]


class VolterraFilter:
    """Adaptive second-order Volterra filter with per-kernel NLMS updates.

    Both kernels share one error signal (supplied by the caller) but are
    normalized by their own regressor energies.  ``n2=0`` drops the
    quadratic part entirely, leaving a plain linear NLMS.
    """

    def __init__(self, n1, n2, mu1, mu2=None, eps=1e-8):
        if n1 < 1 or n2 < 0:
            raise ValueError("kernel lengths must be n1 >= 1, n2 >= 0")
        if mu1 <= 0.0 or (n2 > 0 and (mu2 is None or mu2 <= 0.0)):
            raise ValueError("step sizes must be positive")
        self.n1 = n1
        self.n2 = n2
        self.mu1 = float(mu1)
        self.mu2 = 0.0 if n2 == 0 else float(mu2)
        self.eps = float(eps)
        self.h1 = np.zeros(n1)
        self.h2 = np.zeros(n2 * (n2 + 1) // 2)

    def _regressors(self, history):
        history = np.asarray(history, dtype=float)
        need = max(self.n1, self.n2)
        if history.shape[0] < need:
            raise ValueError(f"need {need} history samples, got {history.shape[0]}")
        u1 = history[: self.n1]
        phi = quad_regressor(history, self.n2) if self.n2 > 0 else np.zeros(0)
        return u1, phi

    def output(self, history):
        """(total y, linear part y1, quadratic part y2)."""
        u1, phi = self._regressors(history)
        y1 = float(self.h1 @ u1)
        y2 = float(self.h2 @ phi) if self.n2 > 0 else 0.0
        return y1 + y2, y1, y2

    def adapt(self, history, e):
        """One shared-error update of both kernels."""
        u1, phi = self._regressors(history)
        self.h1 = self.h1 + self.mu1 * e * u1 / (self.eps + float(u1 @ u1))
        if self.n2 > 0:
            self.h2 = self.h2 + self.mu2 * e * phi / (self.eps + float(phi @ phi))


class CKCanceller:
    """Combination of two linear kernels and a gated quadratic kernel."""

    def __init__(self, n1, n2, mu_l1, mu_l2, mu_q, mixer_mu=0.25, eps=1e-8,
                 **mixer_kwargs):
        if n1 < 1 or n2 < 1:
            raise ValueError("kernel lengths must be >= 1")
        self.n1 = n1
        self.n2 = n2
        self.mu_l1 = float(mu_l1)
        self.mu_l2 = float(mu_l2)
        self.mu_q = float(mu_q)
        self.eps = float(eps)
        self.wl1 = np.zeros(n1)
        self.wl2 = np.zeros(n1)
        self.wq = np.zeros(n2 * (n2 + 1) // 2)
        self.mixer1 = Mixer("cvx-pn-lms", mixer_mu, **mixer_kwargs)
        self.mixer2 = Mixer("cvx-pn-lms", mixer_mu, **mixer_kwargs)

    @property
    def lam1(self):
        return self.mixer1.lam

    @property
    def lam2(self):
        return self.mixer2.lam

    def output(self, history):
        """(y, y_l1, y_l2, y_q) using the current mixing parameters."""
        history = np.asarray(history, dtype=float)
        need = max(self.n1, self.n2)
        if history.shape[0] < need:
            raise ValueError(f"need {need} history samples, got {history.shape[0]}")
        u1 = history[: self.n1]
        phi = quad_regressor(history, self.n2)
        y_l1 = float(self.wl1 @ u1)
        y_l2 = float(self.wl2 @ u1)
        y_q = float(self.wq @ phi)
        y = (self.lam1 * y_l1 + (1.0 - self.lam1) * y_l2) + self.lam2 * y_q
        return y, y_l1, y_l2, y_q

    def step(self, history, d):
        """One sample; returns (y, e) with the pre-update combined output."""
        history = np.asarray(history, dtype=float)
        u1 = history[: self.n1]
        phi = quad_regressor(history, self.n2)
        y, y_l1, y_l2, y_q = self.output(history)
        e = d - y
        y_lin = self.lam1 * y_l1 + (1.0 - self.lam1) * y_l2
        y_nl = self.lam2 * y_q
        # kernel-local errors: own output plus the other order's combination
        e_l1 = d - y_l1 - y_nl
        e_l2 = d - y_l2 - y_nl
        e_q = d - y_q - y_lin
        un = self.eps + float(u1 @ u1)
        pn = self.eps + float(phi @ phi)
        self.wl1 = self.wl1 + self.mu_l1 * e_l1 * u1 / un
        self.wl2 = self.wl2 + self.mu_l2 * e_l2 * u1 / un
        self.wq = self.wq + self.mu_q * e_q * phi / pn
        # the all-zeros branch never adapts, so the second mixer's pair is
        # (y_q, 0); both mixers see the global error
        self.mixer1.step(e, y_l1, y_l2)
        self.mixer2.step(e, y_q, 0.0)
        return y, e
