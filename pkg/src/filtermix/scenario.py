"""Scenario builders and ensemble orchestration.

This module turns experiment descriptions into kernel calls: it builds
input signals, plants, random-walk increment streams, and per-run random
generators, then averages kernel outputs over independent realizations.

Determinism contract
--------------------
Every random quantity derives from a single master seed:

* run ``k`` uses ``SeedSequence((seed, k))`` feeding a Philox generator,
* auxiliary draws (plants, impulse responses, calibration signals) use
  ``SeedSequence((seed, _AUX_TAG, j))`` so they can never collide with a
  run stream.

Runs are always accumulated in run-index order, so results are identical
for any ``FILTERMIX_THREADS`` setting and for both execution backends.
"""

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import lfilter

from . import _kernels
from ._accel import thread_count
from .combo import ACTIVATIONS, RULES, sigmoid
from .transfer import TransferPolicy

_AUX_TAG = 0x5EEDFACE

_FILTER_CODES = {"lms": 0, "nlms": 1, "za-nlms": 2, "rls": 3}
_RULE_CODES = {name: i for i, name in enumerate(RULES)}
_ACT_CODES = {name: i for i, name in enumerate(ACTIVATIONS)}


def run_rng(seed, run_index):
    """Philox generator for one realization of an ensemble."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, run_index))))


def aux_rng(seed, tag):
    """Philox generator for a deterministic auxiliary draw (plants, RIRs...)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, _AUX_TAG, tag))))


# ---------------------------------------------------------------------------
# signals, plants, and plant motion


def white_signal(rng, n_samples, var=1.0):
    return np.sqrt(var) * rng.standard_normal(n_samples)


def ar1_signal(rng, n_samples, coeff, var=1.0):
    """Stationary Gaussian AR(1) stream with variance ``var``.

    x(n) = coeff*x(n-1) + sqrt(var*(1-coeff^2))*g(n), started from the
    stationary marginal so there is no warm-up transient.
    """
    if not -1.0 < coeff < 1.0:
        raise ValueError(f"AR(1) coefficient must lie in (-1, 1), got {coeff}")
    g = rng.standard_normal(n_samples + 1)
    x0 = np.sqrt(var) * g[0]
    c = np.sqrt(var * (1.0 - coeff * coeff))
    out, _ = lfilter([c], [1.0, -coeff], g[1:], zi=[coeff * x0])
    return out


def laplace_ar1_signal(rng, n_samples, coeff):
    """Unit-variance AR(1) stream driven by Laplacian innovations."""
    if not -1.0 < coeff < 1.0:
        raise ValueError(f"AR(1) coefficient must lie in (-1, 1), got {coeff}")
    g = rng.laplace(0.0, 1.0 / np.sqrt(2.0), n_samples + 1)
    c = np.sqrt(1.0 - coeff * coeff)
    out, _ = lfilter([c], [1.0, -coeff], g[1:], zi=[coeff * g[0]])
    return out


def make_signal(rng, n_samples, kind, var=1.0, coeff=0.0):
    if kind == "white":
        return white_signal(rng, n_samples, var)
    if kind == "ar1":
        return ar1_signal(rng, n_samples, coeff, var)
    if kind == "laplace-ar1":
        return laplace_ar1_signal(rng, n_samples, coeff)
    raise ValueError(f"unknown input kind {kind!r}")


def input_correlation(m, kind, var=1.0, coeff=0.0):
    """Covariance matrix of the regressor for the given input model."""
    if kind == "white":
        return var * np.eye(m)
    if kind == "ar1":
        return var * toeplitz(coeff ** np.arange(m))
    raise ValueError(f"no closed-form correlation for input kind {kind!r}")


def fixed_plant(seed, m, norm2=1.0, tag=0):
    """Deterministic Gaussian plant vector scaled to squared norm ``norm2``."""
    g = aux_rng(seed, 100 + tag).standard_normal(m)
    return g * np.sqrt(norm2) / np.linalg.norm(g)


def sparse_plant(seed, m, n_active, norm2=1.0, tag=0):
    """Deterministic plant with ``n_active`` nonzero Gaussian taps."""
    rng = aux_rng(seed, 300 + tag)
    support = rng.choice(m, size=n_active, replace=False)
    vals = rng.standard_normal(n_active)
    w = np.zeros(m)
    w[support] = vals * np.sqrt(norm2) / np.linalg.norm(vals)
    return w


def q_mixture(r, alpha, scale=1e-5):
    """Random-walk covariance blending R and inv(R), with trace ``scale``.

    Q = scale * [alpha*R/tr(R) + (1-alpha)*inv(R)/tr(inv(R))]; the trace is
    ``scale`` for every alpha in [0, 1], so sweeping alpha moves the energy
    of the plant motion between the input's principal and minor axes
    without changing tr(Q).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    r = np.asarray(r, dtype=float)
    r_inv = np.linalg.inv(r)
    q = scale * (alpha * r / np.trace(r) + (1.0 - alpha) * r_inv / np.trace(r_inv))
    return 0.5 * (q + q.T)


def increments(rng, n_samples, q_chol):
    """Pre-generated random-walk steps q(n) ~ N(0, Q), one row per sample."""
    m = q_chol.shape[0]
    return rng.standard_normal((n_samples, m)) @ q_chol.T


_EMPTY_INCR = np.zeros((0, 0))
_EMPTY_TIMES = np.zeros(0, dtype=np.int64)


def build_changes(seed, w_o, changes, norm2):
    """Abrupt-change schedule as (times, vectors) arrays for the kernels.

    ``changes`` is a sequence of (time, spec) pairs where spec is
    "sign-flip" (negate the current plant), "fresh" (independent draw of
    the same norm), or an explicit replacement vector.  Times must be
    strictly increasing.
    """
    m = w_o.shape[0]
    if not changes:
        return _EMPTY_TIMES, np.zeros((0, m))
    times = np.array([int(t) for t, _ in changes], dtype=np.int64)
    if np.any(np.diff(times) <= 0):
        raise ValueError("change times must be strictly increasing")
    vecs = np.zeros((len(changes), m))
    cur = w_o.copy()
    for i, (_, mode) in enumerate(changes):
        if isinstance(mode, str):
            if mode == "sign-flip":
                cur = -cur
            elif mode == "fresh":
                cur = fixed_plant(seed, m, norm2, tag=200 + i)
            else:
                raise ValueError(f"unknown change mode {mode!r}")
        else:
            cur = np.asarray(mode, dtype=float)
            if cur.shape != (m,):
                raise ValueError(f"replacement vector shape {cur.shape} != ({m},)")
        vecs[i] = cur
    return times, vecs


# ---------------------------------------------------------------------------
# component descriptions


@dataclass(frozen=True)
class FilterSpec:
    """One combination member.

    kind: "lms", "nlms", "za-nlms", or "rls".  For "rls", ``mu`` is the
    forgetting rate beta (forgetting factor 1 - beta) and ``eps`` is the
    inverse-correlation initialization scale delta (default 1e-2); for the
    others ``eps`` is the normalization regularizer (default 1e-8).
    ``rho`` is the zero-attraction strength, used only by "za-nlms".
    """

    kind: str
    mu: float
    eps: float | None = None
    rho: float = 0.0

    def __post_init__(self):
        if self.kind not in _FILTER_CODES:
            raise ValueError(f"unknown filter kind {self.kind!r}")

    @property
    def code(self):
        return _FILTER_CODES[self.kind]

    @property
    def eps_value(self):
        if self.eps is not None:
            return float(self.eps)
        return 1e-2 if self.kind == "rls" else 1e-8


@dataclass(frozen=True)
class MixerSpec:
    """Mixing-parameter adaptation rule and its constants.

    ``activation`` defaults to "scaled" for cvx-pn-lms and "plain" for
    cvx-lms; it is ignored by the affine rules.
    """

    rule: str
    mu: float
    eta: float = 0.9
    eps: float = 1e-8
    a_max: float = 4.0
    activation: str | None = None

    def __post_init__(self):
        if self.rule not in _RULE_CODES:
            raise ValueError(f"unknown mixer rule {self.rule!r}")
        if self.activation is not None and self.activation not in _ACT_CODES:
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def activation_value(self):
        if self.activation is not None:
            return self.activation
        return "scaled" if self.rule == "cvx-pn-lms" else "plain"

    def kernel_params(self):
        """(rule, act, mu, eta, eps, a_max, act_lo, act_scale) for kernels."""
        act = _ACT_CODES[self.activation_value]
        if act == 1:
            lo = sigmoid(-self.a_max)
            scale = 1.0 / (sigmoid(self.a_max) - lo)
        else:
            lo, scale = 0.0, 1.0
        return (_RULE_CODES[self.rule], act, float(self.mu), float(self.eta),
                float(self.eps), float(self.a_max), lo, scale)


_NO_TRANSFER = TransferPolicy("none").kernel_params()


# ---------------------------------------------------------------------------
# ensemble machinery


def ordered_runs(worker, n_runs, n_threads=None):
    """Yield worker(0..n_runs-1) results in index order.

    With more than one thread, a bounded window of futures keeps memory
    flat while the in-order consumption keeps accumulation identical to
    the serial schedule.
    """
    if n_threads is None:
        n_threads = thread_count()
    if n_threads <= 1 or n_runs <= 1:
        for k in range(n_runs):
            yield worker(k)
        return
    window = 2 * n_threads
    with ThreadPoolExecutor(max_workers=n_threads) as ex:
        pending = deque()
        k = 0
        while k < min(window, n_runs):
            pending.append(ex.submit(worker, k))
            k += 1
        while pending:
            res = pending.popleft().result()
            if k < n_runs:
                pending.append(ex.submit(worker, k))
                k += 1
            yield res


def _mean_accumulate(gen, n_arrays, n_runs, what):
    """Average homogeneous array tuples (ending with an ok flag) from gen."""
    acc = None
    for result in gen:
        *arrays, ok = result
        if not ok:
            raise RuntimeError(f"{what}: a realization diverged (non-finite error)")
        if acc is None:
            acc = [np.array(a, dtype=float, copy=True) for a in arrays]
        else:
            for slot, arr in zip(acc, arrays):
                slot += arr
    for slot in acc:
        slot /= n_runs
    return acc


# ---------------------------------------------------------------------------
# experiment-level ensembles


def single_ensemble(*, seed, runs, n_samples, m, filt, sigma_v2,
                    input_kind="white", input_var=1.0, ar_coeff=0.0,
                    w_o=None, w_o_norm2=1.0, q=None, threads=None):
    """Mean squared a-priori error of one filter, averaged over runs."""
    if w_o is None:
        w_o = fixed_plant(seed, m, w_o_norm2)
    q_chol = None if q is None else np.linalg.cholesky(q)

    def worker(k):
        rng = run_rng(seed, k)
        x = make_signal(rng, n_samples, input_kind, input_var, ar_coeff)
        v = np.sqrt(sigma_v2) * rng.standard_normal(n_samples)
        incr = _EMPTY_INCR if q_chol is None else increments(rng, n_samples, q_chol)
        return _kernels.run_single(x, v, w_o, incr, filt.code, filt.mu,
                                   filt.eps_value, filt.rho)

    (z,) = _mean_accumulate(ordered_runs(worker, runs, threads), 1, runs, "single_ensemble")
    return {"z": z, "w_o": w_o}


def combo2_ensemble(*, seed, runs, n_samples, m, f1, f2, mixer, sigma_v2,
                    input_kind="white", input_var=1.0, ar_coeff=0.0,
                    w_o=None, w_o_norm2=1.0, q=None, changes=(),
                    transfer=None, msd_stride=0, threads=None):
    """Ensemble averages for a two-filter combination.

    Returns per-sample mean squared a-priori errors of both members (z1,
    z2), their cross moment (z12), the combination (zc), the mean squared
    overall error (mse), the mean mixing parameter (lam), and, when
    msd_stride > 0, strided mean squared weight deviations (msd1, msd2,
    msdc at sample times msd_times).
    """
    if w_o is None:
        w_o = fixed_plant(seed, m, w_o_norm2)
    q_chol = None if q is None else np.linalg.cholesky(q)
    times, vecs = build_changes(seed, w_o, changes, w_o_norm2)
    mix = mixer.kernel_params()
    tr = _NO_TRANSFER if transfer is None else transfer.kernel_params()

    def worker(k):
        rng = run_rng(seed, k)
        x = make_signal(rng, n_samples, input_kind, input_var, ar_coeff)
        v = np.sqrt(sigma_v2) * rng.standard_normal(n_samples)
        incr = _EMPTY_INCR if q_chol is None else increments(rng, n_samples, q_chol)
        return _kernels.run_combo2(
            x, v, w_o, incr, times, vecs,
            f1.code, f1.mu, f1.eps_value, f1.rho,
            f2.code, f2.mu, f2.eps_value, f2.rho,
            *mix, *tr, msd_stride,
        )

    z1, z2, z12, zc, mse, lam, msd1, msd2, msdc = _mean_accumulate(
        ordered_runs(worker, runs, threads), 9, runs, "combo2_ensemble")
    out = {"z1": z1, "z2": z2, "z12": z12, "zc": zc, "mse": mse,
           "lam": lam, "w_o": w_o}
    if msd_stride > 0:
        out.update(msd1=msd1, msd2=msd2, msdc=msdc,
                   msd_times=np.arange(0, n_samples, msd_stride))
    return out


def lowcost_ensemble(*, seed, runs, n_samples, m, mu1, mu2, mixer, sigma_v2,
                     input_kind="white", input_var=1.0, ar_coeff=0.0,
                     w_o=None, w_o_norm2=1.0, q=None, changes=(),
                     coeff_bits=0, sat=1.0, threads=None):
    """Ensemble averages for the reduced-cost difference combination.

    ``coeff_bits`` > 0 stores the difference filter on a 2**-coeff_bits
    grid saturated at +-sat; 0 keeps full precision.  Returns mean squared
    a-priori errors, mean mixing parameter, and the total saturation count.
    """
    if w_o is None:
        w_o = fixed_plant(seed, m, w_o_norm2)
    q_chol = None if q is None else np.linalg.cholesky(q)
    times, vecs = build_changes(seed, w_o, changes, w_o_norm2)
    mix = mixer.kernel_params()
    qstep = 2.0 ** (-coeff_bits) if coeff_bits > 0 else 0.0

    def worker(k):
        rng = run_rng(seed, k)
        x = make_signal(rng, n_samples, input_kind, input_var, ar_coeff)
        v = np.sqrt(sigma_v2) * rng.standard_normal(n_samples)
        incr = _EMPTY_INCR if q_chol is None else increments(rng, n_samples, q_chol)
        return _kernels.run_lowcost(
            x, v, w_o, incr, times, vecs, mu1, mu2, qstep, sat, *mix,
        )

    acc = None
    sat_total = 0
    for e2, z1, z2, zc, lam, sat_count, ok in ordered_runs(worker, runs, threads):
        if not ok:
            raise RuntimeError("lowcost_ensemble: a realization diverged")
        sat_total += sat_count
        if acc is None:
            acc = [z1.copy(), z2.copy(), zc.copy(), lam.copy()]
        else:
            for slot, arr in zip(acc, (z1, z2, zc, lam)):
                slot += arr
    for slot in acc:
        slot /= runs
    return {"z1": acc[0], "z2": acc[1], "zc": acc[2], "lam": acc[3],
            "sat_count": sat_total, "w_o": w_o}


def lowcost_single_run(*, seed, run_index, n_samples, m, mu1, mu2, mixer,
                       sigma_v2, input_kind="white", input_var=1.0,
                       ar_coeff=0.0, w_o=None, w_o_norm2=1.0,
                       coeff_bits=0, sat=1.0):
    """One full-resolution realization of the difference combination.

    Returns the raw kernel outputs for run ``run_index`` of the matching
    ensemble: (e2 series, squared a-priori errors, mixing parameter,
    saturation count).  Used by the exact-equivalence diagnostics.
    """
    if w_o is None:
        w_o = fixed_plant(seed, m, w_o_norm2)
    rng = run_rng(seed, run_index)
    x = make_signal(rng, n_samples, input_kind, input_var, ar_coeff)
    v = np.sqrt(sigma_v2) * rng.standard_normal(n_samples)
    qstep = 2.0 ** (-coeff_bits) if coeff_bits > 0 else 0.0
    e2, ea1_sq, ea2_sq, eac_sq, lam, sat_count, ok = _kernels.run_lowcost(
        x, v, w_o, _EMPTY_INCR, _EMPTY_TIMES, np.zeros((0, m)),
        mu1, mu2, qstep, sat, *mixer.kernel_params(),
    )
    if not ok:
        raise RuntimeError("lowcost_single_run: realization diverged")
    return {"e2": e2, "ea1_sq": ea1_sq, "ea2_sq": ea2_sq, "eac_sq": eac_sq,
            "lam": lam, "sat_count": sat_count, "x": x, "v": v, "w_o": w_o}


def blockwise_ensemble(*, seed, runs, n_samples, m, n_blocks, mu, mixer_mu,
                       sigma_v2, segments, eps=1e-8, eta=0.9, mixer_eps=1e-8,
                       a_max=4.0, msd_stride=100, threads=None):
    """Ensemble mean squared deviation of the block-wise shrinkage filter.

    ``segments`` is a sequence of (start_time, spec) pairs, the first
    start_time must be 0; spec is either an active-tap count (an
    independent sparse plant is drawn) or an explicit plant vector.
    """
    if not segments or segments[0][0] != 0:
        raise ValueError("segments must start at time 0")
    bounds = np.zeros(n_blocks + 1, dtype=np.int64)
    base = m // n_blocks
    for qi in range(n_blocks):
        bounds[qi + 1] = bounds[qi] + base
    bounds[n_blocks] = m  # last block absorbs the remainder
    plants = [np.asarray(spec, dtype=float) if np.ndim(spec) > 0
              else sparse_plant(seed, m, int(spec), tag=i)
              for i, (_, spec) in enumerate(segments)]
    w_o0 = plants[0]
    times = np.array([t for t, _ in segments[1:]], dtype=np.int64)
    vecs = np.array(plants[1:]) if len(plants) > 1 else np.zeros((0, m))
    lo = sigmoid(-a_max)
    scale = 1.0 / (sigmoid(a_max) - lo)

    def worker(k):
        rng = run_rng(seed, k)
        x = rng.standard_normal(n_samples)
        v = np.sqrt(sigma_v2) * rng.standard_normal(n_samples)
        return _kernels.run_blockwise(
            x, v, w_o0, times, vecs, bounds, mu, eps,
            mixer_mu, eta, mixer_eps, a_max, lo, scale, msd_stride,
        )

    msd, e_sq = _mean_accumulate(ordered_runs(worker, runs, threads), 2, runs,
                                 "blockwise_ensemble")
    return {"msd": msd, "e_sq": e_sq,
            "msd_times": np.arange(0, n_samples, msd_stride), "plants": plants}


def exp_decay_rir(seed, length, decay=8.0, tag=0):
    """Unit-norm random impulse response with an exponential envelope."""
    rng = aux_rng(seed, 400 + tag)
    h = rng.standard_normal(length) * np.exp(-np.arange(length) / decay)
    return h / np.linalg.norm(h)


def calibrate_echo(seed, h, lnlr_db_segments, ar_coeff=0.8, enr_db=30.0,
                   n_cal=100_000):
    """Distortion gains and noise variance for the echo scenario.

    For each requested linear-to-nonlinear power ratio (dB; infinity means
    no distortion), finds gamma such that the echo-path power of
    gamma*(x^2 - E[x^2]) filtered by ``h`` sits LNLR dB below the power of
    the filtered linear part.  The near-end noise variance is set ENR dB
    below the linear echo power.  Uses one deterministic master
    calibration sequence, so every run shares the same gains.
    """
    x = laplace_ar1_signal(aux_rng(seed, 500), n_cal, ar_coeff)
    lin = np.convolve(x, h)[: n_cal]
    x2 = x * x
    nl_unit = np.convolve(x2 - x2.mean(), h)[: n_cal]
    p_lin = float(np.mean(lin * lin))
    p_nl_unit = float(np.mean(nl_unit * nl_unit))
    gammas = []
    for lnlr in lnlr_db_segments:
        if np.isinf(lnlr):
            gammas.append(0.0)
        else:
            gammas.append(float(np.sqrt(p_lin / (10.0 ** (lnlr / 10.0) * p_nl_unit))))
    sigma_e0_2 = p_lin / 10.0 ** (enr_db / 10.0)
    return {"gammas": gammas, "sigma_e0_2": sigma_e0_2, "p_lin": p_lin}


def echo_ensemble(*, seed, runs, n_samples, n1=32, n2=16, rir_len=32,
                  rir_change=None, segment_starts=(0,),
                  lnlr_db_segments=(np.inf,), ar_coeff=0.8, enr_db=30.0,
                  mu_l1=1.0, mu_l2=0.1, mu_q=0.5,
                  mu_vf_l=0.5, mu_vf_q=0.25, eps=1e-8,
                  mixer_mu=0.25, eta=0.9, mixer_eps=1e-8, a_max=4.0,
                  threads=None):
    """Ensemble averages for the nonlinear echo scenario.

    Three cancellers (combined kernels, linear-only combination, full
    second-order Volterra) run on identical data.  The Volterra baseline
    adapts both kernels with the shared global error at its own steps
    (mu_vf_l, mu_vf_q), whose normalized sum must stay below one for
    stability.  Returns mean squared clean echo, mean squared residuals
    per system, and the mean mixing parameters of the combined-kernels
    canceller.
    """
    if len(segment_starts) != len(lnlr_db_segments):
        raise ValueError("segment_starts and lnlr_db_segments lengths differ")
    if segment_starts[0] != 0:
        raise ValueError("segments must start at time 0")
    if rir_change is None:
        rir_change = n_samples // 2
    h_a = exp_decay_rir(seed, rir_len, tag=0)
    h_b = exp_decay_rir(seed, rir_len, tag=1)
    cal = calibrate_echo(seed, h_a, lnlr_db_segments, ar_coeff, enr_db)
    gamma = np.zeros(n_samples)
    starts = list(segment_starts) + [n_samples]
    for i, g in enumerate(cal["gammas"]):
        gamma[starts[i]: starts[i + 1]] = g
    sigma_e0 = np.sqrt(cal["sigma_e0_2"])
    lo = sigmoid(-a_max)
    scale = 1.0 / (sigmoid(a_max) - lo)

    def worker(k):
        rng = run_rng(seed, k)
        x = laplace_ar1_signal(rng, n_samples, ar_coeff)
        e0 = sigma_e0 * rng.standard_normal(n_samples)
        return _kernels.run_echo(
            x, e0, gamma, h_a, h_b, rir_change, n1, n2,
            mu_l1, mu_l2, mu_q, mu_vf_l, mu_vf_q, eps,
            mixer_mu, eta, mixer_eps, a_max, lo, scale,
        )

    echo_sq, res_ck, res_lin, res_vf, lam1, lam2 = _mean_accumulate(
        ordered_runs(worker, runs, threads), 6, runs, "echo_ensemble")
    return {"echo_sq": echo_sq, "res_ck": res_ck, "res_lin": res_lin,
            "res_vf": res_vf, "lam1": lam1, "lam2": lam2,
        "gammas": cal["gammas"], "sigma_e0_2": cal["sigma_e0_2"]}


# ---------------------------------------------------------------------------
# post-processing helpers


def to_db(x):
    """10*log10, elementwise; nonpositive values map quietly to -inf/nan."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


def moving_average(x, width):
    """Centered-start moving average used to smooth ensemble curves."""
    x = np.asarray(x, dtype=float)
    if width <= 1:
        return x.copy()
    kernel = np.full(width, 1.0 / width)
    return np.convolve(x, kernel)[: x.size]


def convex_reference(z1, z2, z12):
    """Per-sample optimal convex mixer and its combined error power.

    Computed from ensemble moment estimates; when the quadratic form is
    degenerate the better single member is used.
    """
    z1 = np.asarray(z1, float)
    z2 = np.asarray(z2, float)
    z12 = np.asarray(z12, float)
    den = z1 + z2 - 2.0 * z12
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(den > 0.0, (z2 - z12) / den, np.where(z1 <= z2, 1.0, 0.0))
    lam = np.clip(lam, 0.0, 1.0)
    zc = lam * lam * z1 + (1.0 - lam) ** 2 * z2 + 2.0 * lam * (1.0 - lam) * z12
    return lam, zc


def erle(d_series, e_series, e0_series, window=1):
    """Echo-return-loss enhancement in dB over a sliding window.

    10*log10 of windowed mean (d - e0)^2 over windowed mean (e - e0)^2;
    a zero-power residual window yields +inf.
    """
    echo_sq = (np.asarray(d_series, float) - np.asarray(e0_series, float)) ** 2
    res_sq = (np.asarray(e_series, float) - np.asarray(e0_series, float)) ** 2
    num = moving_average(echo_sq, window)
    den = moving_average(res_sq, window)
    out = np.full(num.shape, np.inf)
    nz = den > 0.0
    out[nz] = 10.0 * np.log10(num[nz] / den[nz])
    return out


def erle_db(echo_sq_mean, res_sq_mean):
    """Echo-return-loss enhancement in dB from ensemble mean powers."""
    return to_db(np.asarray(echo_sq_mean) / np.asarray(res_sq_mean))


def segment_erle_db(echo_sq_mean, res_sq_mean, start, stop):
    """Single ERLE number for a sample range, from summed powers."""
    e = float(np.sum(echo_sq_mean[start:stop]))
    r = float(np.sum(res_sq_mean[start:stop]))
    return 10.0 * np.log10(e / r)
