"""Two-filter convex and affine combination layer.

The combined output is ``lambda * y1 + (1 - lambda) * y2``.  Four rules
adapt the mixing parameter from the combined error:

==============  ==========  ==========================================
rule            constraint  update
==============  ==========  ==========================================
aff-lms         none        lam += mu * e * (y1 - y2)
aff-pn-lms      none        lam += mu/(eps + p) * e * (y1 - y2)
cvx-lms         [0, 1]      a += mu * g * e * (y1 - y2), lam = act(a)
cvx-pn-lms      [0, 1]      a += mu/(eps + p) * g * e * (y1 - y2)
==============  ==========  ==========================================

where ``p`` is a low-pass power estimate of (y1 - y2)^2, ``g`` is the
activation derivative factor, and ``a`` is clamped to [-a_max, a_max]
every step.  The convex rules map ``a`` to lambda through either the
plain sigmoid (default for cvx-lms) or a scaled and shifted sigmoid that
attains 0 and 1 exactly at the interval ends (default for cvx-pn-lms).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "sigmoid",
    "scaled_sigmoid",
    "combine_outputs",
    "combine_weights",
    "update_power",
    "Mixer",
    "RULES",
]

RULES = ("aff-lms", "aff-pn-lms", "cvx-lms", "cvx-pn-lms")
ACTIVATIONS = ("plain", "scaled")


def sigmoid(a: float) -> float:
    """1 / (1 + exp(-a)), evaluated without overflow for any finite a."""
    if a >= 0.0:
        return 1.0 / (1.0 + math.exp(-a))
    z = math.exp(a)
    return z / (1.0 + z)


def scaled_sigmoid(a: float, a_max: float) -> float:
    """Sigmoid rescaled so that -a_max maps to 0 and +a_max maps to 1."""
    if abs(a) > a_max:
        raise ValueError(f"a={a} outside [-{a_max}, {a_max}]; clamp before activating")
    lo = sigmoid(-a_max)
    return (sigmoid(a) - lo) / (sigmoid(a_max) - lo)


def combine_outputs(lam: float, y1: float, y2: float) -> float:
    return lam * y1 + (1.0 - lam) * y2


def combine_weights(lam: float, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
    """lam*w1 + (1-lam)*w2, zero-padding the shorter vector on the right."""
    n = max(len(w1), len(w2))
    if len(w1) != n:
        w1 = np.concatenate([w1, np.zeros(n - len(w1))])
    if len(w2) != n:
        w2 = np.concatenate([w2, np.zeros(n - len(w2))])
    return lam * w1 + (1.0 - lam) * w2


def update_power(p: float, y1: float, y2: float, eta: float) -> float:
    """p <- eta*p + (1-eta)*(y1-y2)^2."""
    diff = y1 - y2
    return eta * p + (1.0 - eta) * diff * diff


class Mixer:
    """Mixing-parameter state and its adaptation rule.

    ``mu`` is mu_lambda for the affine rules and mu_a for the convex ones.
    Neutral start: lam(0)=0.5 (a(0)=0 for convex rules), p(0)=0 so the
    first power-normalized step divides by eps alone.
    """

    def __init__(
        self,
        rule: str,
        mu: float,
        eta: float = 0.9,
        eps: float = 1e-8,
        a_max: float = 4.0,
        activation: str | None = None,
    ):
        if rule not in RULES:
            raise ValueError(f"unknown rule {rule!r}, expected one of {RULES}")
        if mu <= 0:
            raise ValueError(f"mu must be > 0, got {mu}")
        if not 0.0 <= eta < 1.0:
            raise ValueError(f"eta must be in [0, 1), got {eta}")
        if eps <= 0:
            raise ValueError(f"eps must be > 0, got {eps}")
        if a_max <= 0:
            raise ValueError(f"a_max must be > 0, got {a_max}")
        if activation is None:
            activation = "scaled" if rule == "cvx-pn-lms" else "plain"
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        self.rule = rule
        self.mu = mu
        self.eta = eta
        self.eps = eps
        self.a_max = a_max
        self.activation = activation
        self.lam = 0.5
        self.a = 0.0
        self.p = 0.0

    @property
    def convex(self) -> bool:
        return self.rule.startswith("cvx")

    def _activate(self, a: float) -> float:
        if self.activation == "plain":
            return sigmoid(a)
        return scaled_sigmoid(a, self.a_max)

    def step(self, e: float, y1: float, y2: float) -> float:
        """Advance lambda given the combined error and component outputs."""
        diff = y1 - y2
        if self.rule == "aff-lms":
            self.lam += self.mu * e * diff
        elif self.rule == "aff-pn-lms":
            self.p = update_power(self.p, y1, y2, self.eta)
            self.lam += self.mu / (self.eps + self.p) * e * diff
        else:
            if self.activation == "plain":
                g = self.lam * (1.0 - self.lam)
            else:
                s = sigmoid(self.a)
                g = s * (1.0 - s)
            if self.rule == "cvx-lms":
                step = self.mu * g * e * diff
            else:
                self.p = update_power(self.p, y1, y2, self.eta)
                step = self.mu / (self.eps + self.p) * g * e * diff
            self.a = min(max(self.a + step, -self.a_max), self.a_max)
            self.lam = self._activate(self.a)
        if not math.isfinite(self.lam):
            raise FloatingPointError(f"mixing parameter diverged ({self.rule})")
        return self.lam

    def combine(self, y1: float, y2: float) -> float:
        return combine_outputs(self.lam, y1, y2)
