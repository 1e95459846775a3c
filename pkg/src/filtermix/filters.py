"""Component adaptive filters: LMS, NLMS, RLS, and zero-attracting NLMS.

All filters share the same contract: ``predict(u)`` returns the current
output without mutating state, ``adapt(u, d)`` performs one update and
returns ``(y, e)`` with ``e = d - y`` computed before the weight change.
Combination layers only ever rely on this contract.
"""

from __future__ import annotations

import numpy as np

__all__ = ["AdaptiveFilter", "LMS", "NLMS", "ZANLMS", "RLS"]


class AdaptiveFilter:
    """Base class holding the weight vector of length ``m``."""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError(f"filter length must be >= 1, got {m}")
        self.m = m
        self.w = np.zeros(m)

    def predict(self, u: np.ndarray) -> float:
        if u.shape != (self.m,):
            raise ValueError(f"regressor shape {u.shape} != ({self.m},)")
        return float(u @ self.w)

    def adapt(self, u: np.ndarray, d: float) -> tuple[float, float]:
        raise NotImplementedError

    def _error(self, u: np.ndarray, d: float) -> tuple[float, float]:
        y = self.predict(u)
        return y, d - y


class LMS(AdaptiveFilter):
    """w <- w + mu * e * u."""

    def __init__(self, m: int, mu: float):
        if mu <= 0:
            raise ValueError(f"mu must be > 0, got {mu}")
        super().__init__(m)
        self.mu = mu

    def adapt(self, u, d):
        y, e = self._error(u, d)
        self.w += self.mu * e * u
        return y, e


class NLMS(AdaptiveFilter):
    """w <- w + mu * e * u / (eps + ||u||^2)."""

    def __init__(self, m: int, mu: float, eps: float = 1e-8):
        if mu <= 0:
            raise ValueError(f"mu must be > 0, got {mu}")
        if eps < 0:
            raise ValueError(f"eps must be >= 0, got {eps}")
        super().__init__(m)
        self.mu = mu
        self.eps = eps

    def adapt(self, u, d):
        y, e = self._error(u, d)
        denom = self.eps + float(u @ u)
        if denom == 0.0:
            raise ZeroDivisionError("zero regressor with eps=0")
        self.w += self.mu * e * u / denom
        return y, e


class ZANLMS(NLMS):
    """NLMS with a zero-attracting term: subtracts rho * sign(w) each step.

    The sign is taken on the pre-update weights and sign(0) = 0, so exactly
    zero coefficients are left untouched.  rho=0 reproduces plain NLMS
    bit for bit.
    """

    def __init__(self, m: int, mu: float, rho: float, eps: float = 1e-8):
        if rho < 0:
            raise ValueError(f"rho must be >= 0, got {rho}")
        super().__init__(m, mu, eps)
        self.rho = rho

    def adapt(self, u, d):
        y, e = self._error(u, d)
        denom = self.eps + float(u @ u)
        if denom == 0.0:
            raise ZeroDivisionError("zero regressor with eps=0")
        if self.rho == 0.0:
            self.w += self.mu * e * u / denom
        else:
            self.w += self.mu * e * u / denom - self.rho * np.sign(self.w)
        return y, e


class RLS(AdaptiveFilter):
    """Exponentially weighted RLS with inverse-correlation matrix P.

    ``beta`` follows the tracking-theory convention: the forgetting factor
    is ``1 - beta``, so beta in (0, 1) and small beta means long memory.
    P starts at I/delta and is re-symmetrized after every update.
    """

    def __init__(self, m: int, beta: float, delta: float = 1e-2):
        if not 0.0 < beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {beta}")
        if delta <= 0:
            raise ValueError(f"delta must be > 0, got {delta}")
        super().__init__(m)
        self.beta = beta
        self.forgetting = 1.0 - beta
        self.P = np.eye(m) / delta

    def adapt(self, u, d):
        y, e = self._error(u, d)
        lam_f = self.forgetting
        Pu = self.P @ u
        k = Pu / (lam_f + float(u @ Pu))
        self.w += k * e
        self.P = (self.P - np.outer(k, Pu)) / lam_f
        self.P = 0.5 * (self.P + self.P.T)
        if not np.all(np.diag(self.P) > 0.0):
            raise FloatingPointError("RLS inverse-correlation matrix lost positive diagonal")
        return y, e
