"""Closed-form steady-state tracking oracle.

Random-walk plant w_o(n) = w_o(n-1) + q(n) with increment covariance Q,
input covariance R, observation-noise variance sigma_v^2.  The module
evaluates the steady-state EMSE of LMS and RLS filters, the cross-EMSE of
a filter pair, and the optimal mixing parameter / EMSE of their affine or
convex combination

    zeta(lam) = lam^2 zeta1 + (1-lam)^2 zeta2 + 2 lam (1-lam) zeta12

whose minimizer is lam = d_zeta2 / (d_zeta1 + d_zeta2) with
d_zeta_i = zeta_i - zeta12 (clamped to [0, 1] in convex mode).  All
quotients are formed from the d_zeta values directly; the near-identical
filter case is numerically delicate and must not subtract large EMSEs
twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = [
    "TrackingSpec",
    "OptimalParams",
    "lms_emse",
    "rls_emse",
    "optimal_params",
    "cross_emse",
    "combined_emse",
    "optimal_lambda",
    "optimal_emse",
    "classify_regime",
    "nsd",
]

# Relative tolerance deciding the all-equal (indeterminate) regime.
CASE4_RTOL = 1e-12


def _check_sym_psd(mat: np.ndarray, name: str) -> None:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    scale = max(float(np.max(np.abs(mat))), 1e-300)
    if float(np.max(np.abs(mat - mat.T))) > 1e-10 * scale:
        raise ValueError(f"{name} is not symmetric")
    if float(np.linalg.eigvalsh(mat).min()) < -1e-10 * scale:
        raise ValueError(f"{name} is not positive semi-definite")


@dataclass(frozen=True)
class TrackingSpec:
    """Noise variance plus input and increment covariance matrices."""

    sigma_v2: float
    R: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        if self.sigma_v2 <= 0:
            raise ValueError(f"sigma_v2 must be > 0, got {self.sigma_v2}")
        _check_sym_psd(self.R, "R")
        _check_sym_psd(self.Q, "Q")
        if self.R.shape != self.Q.shape:
            raise ValueError("R and Q must have matching shapes")

    @property
    def m(self) -> int:
        return self.R.shape[0]

    @property
    def tr_r(self) -> float:
        return float(np.trace(self.R))

    @property
    def tr_q(self) -> float:
        return float(np.trace(self.Q))

    @property
    def tr_qr(self) -> float:
        return float(np.trace(self.Q @ self.R))


class OptimalParams(NamedTuple):
    mu_opt: float
    beta_opt: float
    emse_lms: float
    emse_rls: float


def lms_emse(mu: float, spec: TrackingSpec) -> float:
    """Steady-state EMSE of mu-LMS: [mu sigma_v^2 Tr{R} + Tr{Q}/mu] / 2."""
    if mu <= 0:
        raise ValueError(f"mu must be > 0, got {mu}")
    return 0.5 * (mu * spec.sigma_v2 * spec.tr_r + spec.tr_q / mu)


def rls_emse(beta: float, spec: TrackingSpec) -> float:
    """Steady-state EMSE of RLS with forgetting factor 1 - beta."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    return 0.5 * (beta * spec.sigma_v2 * spec.m + spec.tr_qr / beta)


def optimal_params(spec: TrackingSpec) -> OptimalParams:
    """Optimal step size / forgetting parameter and the EMSE they attain."""
    if spec.tr_q <= 0:
        raise ValueError("Tr{Q} = 0: stationary plant, optimal step size degenerates to 0")
    svr = spec.sigma_v2 * spec.tr_r
    mu_opt = math.sqrt(spec.tr_q / svr)
    beta_opt = math.sqrt(spec.tr_qr / (spec.sigma_v2 * spec.m))
    return OptimalParams(
        mu_opt=mu_opt,
        beta_opt=beta_opt,
        emse_lms=math.sqrt(svr * spec.tr_q),
        emse_rls=math.sqrt(spec.sigma_v2 * spec.m * spec.tr_qr),
    )


def cross_emse(f1: tuple[str, float], f2: tuple[str, float], spec: TrackingSpec) -> float:
    """Steady-state cross-EMSE of a filter pair.

    Each filter is tagged ("lms", mu) or ("rls", beta).  Same-family pairs
    use the closed scalar forms; the mixed pair evaluates

        mu beta sigma_v^2 Tr{(mu R + beta I)^-1 R} + Tr{Q (mu R + beta I)^-1 R}

    with a dense symmetric solve (filter lengths are small).
    """
    kinds = (f1[0], f2[0])
    for kind, par in (f1, f2):
        if kind == "lms":
            if par <= 0:
                raise ValueError(f"mu must be > 0, got {par}")
        elif kind == "rls":
            if not 0.0 < par < 1.0:
                raise ValueError(f"beta must be in (0, 1), got {par}")
        else:
            raise ValueError(f"unknown filter kind {kind!r}")
    if kinds == ("lms", "lms"):
        mu1, mu2 = f1[1], f2[1]
        return (mu1 * mu2 * spec.sigma_v2 * spec.tr_r + spec.tr_q) / (mu1 + mu2)
    if kinds == ("rls", "rls"):
        b1, b2 = f1[1], f2[1]
        return (b1 * b2 * spec.sigma_v2 * spec.m + spec.tr_qr) / (b1 + b2)
    # Mixed pair, order-insensitive.
    mu = f1[1] if kinds[0] == "lms" else f2[1]
    beta = f1[1] if kinds[0] == "rls" else f2[1]
    A = mu * spec.R + beta * np.eye(spec.m)
    S = cho_solve(cho_factor(A), spec.R)
    return mu * beta * spec.sigma_v2 * float(np.trace(S)) + float(np.trace(spec.Q @ S))


def combined_emse(z1: float, z2: float, z12: float, lam: float) -> float:
    """EMSE of the lam-mixture of two filters with the given (cross-)EMSEs."""
    return lam * lam * z1 + (1.0 - lam) ** 2 * z2 + 2.0 * lam * (1.0 - lam) * z12


def _validate_triple(z1: float, z2: float, z12: float) -> None:
    if z1 <= 0 or z2 <= 0:
        raise ValueError(f"component EMSEs must be > 0, got ({z1}, {z2})")
    # Cauchy-Schwartz with a small relative slack for rounded inputs.
    if z12 * z12 > z1 * z2 * (1.0 + 1e-12):
        raise ValueError(f"zeta12^2 = {z12 * z12} exceeds zeta1*zeta2 = {z1 * z2}")


def _is_case4(dz1: float, dz2: float, z1: float, z2: float) -> bool:
    return abs(dz1) + abs(dz2) < CASE4_RTOL * max(z1, z2)


def classify_regime(z1: float, z2: float, z12: float) -> str:
    """Table of operating regimes: which component the optimum favors.

    case1: zeta1 <= zeta12 (convex optimum pinned at lam=1);
    case2: zeta2 <= zeta12 (pinned at lam=0);
    case3: zeta12 < min(zeta1, zeta2) (interior optimum, both modes agree);
    case4: all three equal within tolerance (any lam is optimal).
    """
    _validate_triple(z1, z2, z12)
    dz1, dz2 = z1 - z12, z2 - z12
    if _is_case4(dz1, dz2, z1, z2):
        return "case4"
    if dz1 <= 0:
        return "case1"
    if dz2 <= 0:
        return "case2"
    return "case3"


def optimal_lambda(z1: float, z2: float, z12: float, mode: str = "affine") -> float:
    """Minimizer of the combination EMSE; NaN when the regime is indeterminate."""
    if mode not in ("affine", "convex"):
        raise ValueError(f"mode must be 'affine' or 'convex', got {mode!r}")
    _validate_triple(z1, z2, z12)
    dz1, dz2 = z1 - z12, z2 - z12
    if _is_case4(dz1, dz2, z1, z2):
        return math.nan
    denom = dz1 + dz2
    # denom = E{(e_a1 - e_a2)^2} >= 0 follows from Cauchy-Schwartz.
    assert denom > 0.0, f"degenerate denominator {denom} escaped the case-4 gate"
    lam = dz2 / denom
    if mode == "convex":
        lam = min(max(lam, 0.0), 1.0)
    return lam


def optimal_emse(z1: float, z2: float, z12: float, mode: str = "affine") -> float:
    """EMSE at the optimal mixing parameter (zeta1 in the indeterminate case)."""
    if mode not in ("affine", "convex"):
        raise ValueError(f"mode must be 'affine' or 'convex', got {mode!r}")
    _validate_triple(z1, z2, z12)
    dz1, dz2 = z1 - z12, z2 - z12
    if _is_case4(dz1, dz2, z1, z2):
        return z1
    lam = dz2 / (dz1 + dz2)
    if mode == "convex":
        if lam >= 1.0:
            return z1
        if lam <= 0.0:
            return z2
    f1 = z1 - (1.0 - lam) * dz1
    f2 = z2 - lam * dz2
    assert abs(f1 - f2) <= 1e-12 * max(1.0, z1, z2), (f1, f2)
    # evaluate from the nearer member: the far form subtracts nearly the
    # whole of its base value when lam sits at the other end, losing digits
    return f1 if lam >= 0.5 else f2


def nsd(zeta: float, zeta_ref: float) -> float:
    """Normalized squared deviation, 10 log10(zeta / zeta_ref) in dB."""
    if zeta <= 0 or zeta_ref <= 0:
        raise ValueError("NSD needs positive EMSE values")
    return 10.0 * math.log10(zeta / zeta_ref)
