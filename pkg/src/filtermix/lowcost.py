"""Reduced-cost combination through a stored difference filter.

Instead of running two LMS filters, only the fast filter w1 is kept at
full precision together with the difference dw2 = w2 - w1.  Per sample:

1. e1 = d - u^T w1
2. w1 <- w1 + mu1*e1*u
3. dy2 = u^T dw2
4. e2 = e1 - dy2
5. e = lam*e1 + (1 - lam)*e2
6. dw2 <- quantize(dw2 + (mu2*e2 - mu1*e1)*u)

Step 4 uses the minus sign: with dw2 = w2 - w1, only e2 = e1 - dy2 makes
the implied w2 = w1 + dw2 trajectory identical to a directly adapted
mu2-LMS (the full-precision equivalence test pins this down).  Because
dw2 stays small, it can be stored on a coarse grid: ``quantize`` rounds
to steps of 2**-bits and saturates at a configured range.  Only steps 3
and 6 touch dw2, so exactly 2*M multiplies per sample involve the
reduced-width operand (see ``reduced_width_multiplies``).
"""

import numpy as np

from .combo import Mixer


def quantize(x, bits, sat=1.0):
    """Round to the nearest multiple of 2**-bits, saturating at +-sat.

    Ties round half-up (toward +inf), matching the simulation kernels.
    """
    if bits <= 0:
        raise ValueError(f"bits must be positive, got {bits}")
    step = 2.0 ** (-bits)
    clipped = np.clip(np.asarray(x, dtype=float), -sat, sat)
    return np.clip(step * np.floor(clipped / step + 0.5), -sat, sat)


def reduced_width_multiplies(m):
    """Per-sample multiply count involving the reduced-width dw2 operand."""
    return 2 * m


class DiffCombo:
    """Two-LMS combination stored as (w1, dw2) with quantized dw2.

    ``bits=None`` keeps dw2 at full precision.  ``mixer`` defaults to the
    power-normalized convex rule; it sees the same (e, y1, y2) triple a
    direct two-filter combination would.  Saturation events are counted in
    ``sat_count`` (diagnostic, not fatal).
    """

    def __init__(self, m, mu1, mu2, mixer=None, bits=None, sat=1.0):
        if m < 1:
            raise ValueError("need at least one coefficient")
        if mu1 <= 0.0 or mu2 <= 0.0:
            raise ValueError("step sizes must be positive")
        self.m = m
        self.mu1 = float(mu1)
        self.mu2 = float(mu2)
        self.mixer = Mixer("cvx-pn-lms", 1.0) if mixer is None else mixer
        self.bits = bits
        self.sat = float(sat)
        self.w1 = np.zeros(m)
        self.dw2 = np.zeros(m)
        self.sat_count = 0

    @property
    def w2(self):
        """The implied slow-filter weights w1 + dw2."""
        return self.w1 + self.dw2

    def step(self, u, d):
        """One sample; returns (e1, e2, e)."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.m,):
            raise ValueError(f"expected regressor of shape ({self.m},), got {u.shape}")
        lam = self.mixer.lam
        y1 = float(self.w1 @ u)
        e1 = d - y1
        dy2 = float(self.dw2 @ u)
        e2 = e1 - dy2
        y2 = d - e2
        e = lam * e1 + (1.0 - lam) * e2
        self.w1 = self.w1 + self.mu1 * e1 * u
        raw = self.dw2 + (self.mu2 * e2 - self.mu1 * e1) * u
        if self.bits is None:
            self.dw2 = raw
        else:
            self.sat_count += int(np.count_nonzero(np.abs(raw) > self.sat))
            self.dw2 = quantize(raw, self.bits, self.sat)
        self.mixer.step(e, y1, y2)
        return e1, e2, e
