"""Weight-transfer policies between the members of a two-filter combination.

Three active policies are supported, all gated on the freshly updated
mixing parameter and the global sample index n (counted from run start):

* ``gradual``: whenever lambda >= lam0, leak the fast weights into the
  slow ones, w2 <- ell*w2 + (1 - ell)*w1.
* ``copy``: whenever lambda >= lam0 and n mod n0 == 0, overwrite w2 <- w1.
* ``feedback``: every n0 samples, reset both members to the combined
  weights lambda*w1 + (1 - lambda)*w2.

``none`` is the identity policy.  Transfers never touch the mixer state,
and only ``feedback`` modifies the fast filter.
"""

from dataclasses import dataclass

import numpy as np

_KINDS = ("none", "gradual", "copy", "feedback")
_CODES = {kind: i for i, kind in enumerate(_KINDS)}


@dataclass(frozen=True)
class TransferPolicy:
    """Transfer rule plus its constants.

    ell is the gradual-leak retention in (0, 1); lam0 the mixing-parameter
    threshold in (0, 1); n0 the firing period (>= 2) for copy/feedback.
    Filter 1 is the fast member by convention.
    """

    kind: str
    ell: float = 0.9
    lam0: float = 0.982
    n0: int = 2

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown transfer kind {self.kind!r}")
        if self.kind == "gradual" and not 0.0 < self.ell < 1.0:
            raise ValueError(f"gradual leak ell must lie in (0, 1), got {self.ell}")
        if self.kind in ("gradual", "copy") and not 0.0 < self.lam0 < 1.0:
            raise ValueError(f"threshold lam0 must lie in (0, 1), got {self.lam0}")
        if self.kind in ("copy", "feedback") and self.n0 < 2:
            raise ValueError(f"period n0 must be >= 2, got {self.n0}")

    def kernel_params(self):
        """(code, ell, lam0, n0) in the encoding the kernels use."""
        return (_CODES[self.kind], float(self.ell), float(self.lam0), int(self.n0))


def maybe_transfer(policy, n, lam, w1, w2):
    """Apply ``policy`` at sample ``n`` with mixing parameter ``lam``.

    Returns new (w1, w2); the inputs are not modified.  The combined
    weights needed by the feedback policy are formed only when it fires.
    """
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    if w1.shape != w2.shape:
        raise ValueError(f"weight shapes differ: {w1.shape} vs {w2.shape}")
    if policy.kind == "gradual":
        if lam >= policy.lam0:
            return w1.copy(), policy.ell * w2 + (1.0 - policy.ell) * w1
    elif policy.kind == "copy":
        if lam >= policy.lam0 and n % policy.n0 == 0:
            return w1.copy(), w1.copy()
    elif policy.kind == "feedback":
        if n % policy.n0 == 0:
            wc = lam * w1 + (1.0 - lam) * w2
            return wc, wc.copy()
    return w1.copy(), w2.copy()
