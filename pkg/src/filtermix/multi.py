"""Combinations of more than two filters.

Three topologies are provided for mixing K component outputs:

* a hierarchical binary tree whose internal nodes each own one two-filter
  mixer and combine their subtrees pairwise, bottom-up;
* a one-layer softmax combination, y = sum_k lambda_k y_k with lambda =
  softmax(a), adapted by the exact stochastic gradient of the squared
  combined error;
* a one-layer affine combination, y = sum_{k<K} lambda_k y_k +
  (1 - sum lambda_k) y_K, with a shared power-normalized LMS update.

All three reduce exactly to the two-filter rules at K=2.
"""

from dataclasses import dataclass, field

import numpy as np

from .combo import Mixer


@dataclass
class HierarchyNode:
    """Binary-tree combination node.

    A leaf holds the index of one component output; an internal node holds
    two children and exactly one mixer.  ``output`` combines bottom-up;
    ``adapt`` steps every internal mixer with its local combined error
    d - y_local and the difference of its children's combined outputs.
    """

    leaf: int | None = None
    left: "HierarchyNode | None" = None
    right: "HierarchyNode | None" = None
    mixer: Mixer | None = None

    def __post_init__(self):
        has_internal_parts = (self.left is not None or self.right is not None
                              or self.mixer is not None)
        if self.leaf is not None:
            if has_internal_parts:
                raise ValueError("a leaf node cannot carry children or a mixer")
        elif self.left is None or self.right is None or self.mixer is None:
            raise ValueError(
                "node must be either a leaf or internal with two children and a mixer")

    @property
    def is_leaf(self):
        return self.leaf is not None

    def output(self, component_outputs):
        """Combined output of this subtree."""
        if self.is_leaf:
            try:
                return float(component_outputs[self.leaf])
            except (IndexError, KeyError):
                raise ValueError(f"missing output for leaf {self.leaf}") from None
        return self.mixer.combine(self.left.output(component_outputs),
                                  self.right.output(component_outputs))

    def adapt(self, d, component_outputs):
        """Step every internal mixer; returns this subtree's pre-step output."""
        if self.is_leaf:
            return self.output(component_outputs)
        y_left = self.left.adapt(d, component_outputs)
        y_right = self.right.adapt(d, component_outputs)
        y_local = self.mixer.combine(y_left, y_right)
        self.mixer.step(d - y_local, y_left, y_right)
        return y_local


def balanced_tree(n_leaves, mixer_factory):
    """Balanced binary tree over component indices 0..n_leaves-1."""
    if n_leaves < 1:
        raise ValueError("need at least one leaf")

    def build(lo, hi):
        if hi - lo == 1:
            return HierarchyNode(leaf=lo)
        mid = (lo + hi + 1) // 2
        return HierarchyNode(left=build(lo, mid), right=build(mid, hi),
                             mixer=mixer_factory())

    return build(0, n_leaves)


def softmax(a):
    """exp(a_k)/sum_j exp(a_j), computed shift-invariantly via max(a)."""
    a = np.asarray(a, dtype=float)
    z = np.exp(a - a.max())
    return z / z.sum()


@dataclass
class SoftmaxMixer:
    """One-layer convex combination of K outputs via softmax weights.

    The auxiliary vector a is adapted with the exact gradient of half the
    squared combined error: a_k <- a_k + mu * e * lambda_k * (y_k - y),
    optionally clamped to [-a_max, a_max] (on by default).  At K=2 the
    update direction reduces to the two-filter sigmoid rule.
    """

    n: int
    mu: float
    a_max: float = 4.0
    clamp: bool = True
    a: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two components")
        if self.mu <= 0.0:
            raise ValueError("step size must be positive")
        self.a = np.zeros(self.n)

    @property
    def lam(self):
        return softmax(self.a)

    def combine(self, outputs):
        outputs = np.asarray(outputs, dtype=float)
        if outputs.shape != (self.n,):
            raise ValueError(f"expected {self.n} outputs, got shape {outputs.shape}")
        return float(self.lam @ outputs)

    def step(self, d, outputs):
        """Adapt toward d; returns the pre-step combined output."""
        outputs = np.asarray(outputs, dtype=float)
        lam = self.lam
        y = float(lam @ outputs)
        e = d - y
        self.a = self.a + self.mu * e * lam * (outputs - y)
        if self.clamp:
            np.clip(self.a, -self.a_max, self.a_max, out=self.a)
        if not np.all(np.isfinite(self.a)):
            raise FloatingPointError("softmax state became non-finite")
        return y


@dataclass
class AffineLayer:
    """One-layer affine combination of K outputs.

    y = sum_{k<K} lambda_k y_k + (1 - sum lambda_k) y_K; each free weight
    follows lambda_k <- lambda_k + mu/(eps + p) * e * (y_k - y_K), where
    the shared scalar p tracks the mean over k of (y_k - y_K)^2 with
    forgetting eta.  At K=2 this is exactly the power-normalized affine
    two-filter rule.
    """

    n: int
    mu: float
    eta: float = 0.9
    eps: float = 1e-8
    lam: np.ndarray = field(init=False)
    p: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two components")
        if self.mu <= 0.0:
            raise ValueError("step size must be positive")
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"forgetting eta must lie in [0, 1), got {self.eta}")
        # uniform start: every member, including the K-th, begins at 1/K
        self.lam = np.full(self.n - 1, 1.0 / self.n)

    def weights(self):
        """All K weights, the last one being 1 - sum(lam)."""
        return np.concatenate([self.lam, [1.0 - self.lam.sum()]])

    def combine(self, outputs):
        outputs = np.asarray(outputs, dtype=float)
        if outputs.shape != (self.n,):
            raise ValueError(f"expected {self.n} outputs, got shape {outputs.shape}")
        return float(self.weights() @ outputs)

    def step(self, d, outputs):
        """Adapt toward d; returns the pre-step combined output."""
        outputs = np.asarray(outputs, dtype=float)
        y = self.combine(outputs)
        e = d - y
        diff = outputs[:-1] - outputs[-1]
        self.p = self.eta * self.p + (1.0 - self.eta) * float(np.mean(diff * diff))
        self.lam = self.lam + self.mu / (self.eps + self.p) * e * diff
        if not np.all(np.isfinite(self.lam)):
            raise FloatingPointError("affine layer weights became non-finite")
        return y
