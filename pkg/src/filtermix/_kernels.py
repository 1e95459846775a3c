"""Fused per-run simulation kernels.

These functions carry the per-sample loops of every experiment family and
are compiled with numba unless ``FILTERMIX_NUMBA`` disables it.  They use
explicit element loops (never numpy reductions) so the compiled and the
pure-Python fallback execute the identical floating-point operation
sequence, and they consume pre-generated random arrays so results never
depend on the execution backend or thread schedule.

Integer codes keep the kernels monomorphic:

* filter: 0 = LMS, 1 = NLMS, 2 = zero-attracting NLMS, 3 = RLS
  (for RLS the ``mu`` slot carries the forgetting rate beta and the
  ``eps`` slot the inverse-correlation initialization scale delta)
* mixer rule: 0 = aff-lms, 1 = aff-pn-lms, 2 = cvx-lms, 3 = cvx-pn-lms
* activation: 0 = plain sigmoid, 1 = scaled sigmoid
* transfer: 0 = none, 1 = gradual, 2 = copy, 3 = feedback

A-priori errors are formed as ``e_i - v(n)``, which equals
``u^T(w_o - w_i)`` up to one rounding of d.
"""

import math

import numpy as np

from ._accel import jit


@jit
def _sigmoid(a):
    if a >= 0.0:
        return 1.0 / (1.0 + math.exp(-a))
    z = math.exp(a)
    return z / (1.0 + z)


@jit
def _dot(w, u):
    acc = 0.0
    for i in range(w.shape[0]):
        acc += w[i] * u[i]
    return acc


@jit
def _shift_in(u, x):
    for i in range(u.shape[0] - 1, 0, -1):
        u[i] = u[i - 1]
    u[0] = x


@jit
def _filter_adapt(code, w, u, unorm, e, mu, eps, rho):
    # One in-place weight update; unorm is the precomputed u^T u.
    if code == 0:
        g = mu * e
    else:
        g = mu * e / (eps + unorm)
    if code == 2:
        for i in range(w.shape[0]):
            s = 0.0
            if w[i] > 0.0:
                s = 1.0
            elif w[i] < 0.0:
                s = -1.0
            w[i] += g * u[i] - rho * s
    else:
        for i in range(w.shape[0]):
            w[i] += g * u[i]


@jit
def _rls_adapt(w, p_mat, u, e, beta):
    # Exponentially weighted least squares with forgetting factor 1 - beta;
    # p_mat tracks the inverse input correlation and is kept symmetric.
    m = w.shape[0]
    lam_f = 1.0 - beta
    pu = np.zeros(m)
    for i in range(m):
        acc = 0.0
        for j in range(m):
            acc += p_mat[i, j] * u[j]
        pu[i] = acc
    den = lam_f + _dot(u, pu)
    for i in range(m):
        w[i] += pu[i] / den * e
    for i in range(m):
        ki = pu[i] / den
        for j in range(m):
            p_mat[i, j] = (p_mat[i, j] - ki * pu[j]) / lam_f
    for i in range(m):
        for j in range(i + 1, m):
            s = 0.5 * (p_mat[i, j] + p_mat[j, i])
            p_mat[i, j] = s
            p_mat[j, i] = s


@jit
def _mixer_step(rule, act, lam, a, p, e, y1, y2, mu, eta, eps, a_max, act_lo, act_scale):
    diff = y1 - y2
    if rule == 0:
        lam = lam + mu * e * diff
    elif rule == 1:
        p = eta * p + (1.0 - eta) * diff * diff
        lam = lam + mu / (eps + p) * e * diff
    else:
        if act == 0:
            g = lam * (1.0 - lam)
        else:
            s = _sigmoid(a)
            g = s * (1.0 - s)
        if rule == 2:
            da = mu * g * e * diff
        else:
            p = eta * p + (1.0 - eta) * diff * diff
            da = mu / (eps + p) * g * e * diff
        a = a + da
        if a > a_max:
            a = a_max
        elif a < -a_max:
            a = -a_max
        if act == 0:
            lam = _sigmoid(a)
        else:
            lam = (_sigmoid(a) - act_lo) * act_scale
    return lam, a, p


@jit
def run_single(x, v, w_o0, incr, code, mu, eps, rho):
    """One realization of a lone filter on a (possibly) random-walk plant.

    Returns (ea_sq, ok): per-sample squared a-priori error and a success
    flag (0 when the error went non-finite).
    """
    n_samples = x.shape[0]
    m = w_o0.shape[0]
    tracking = incr.shape[0] > 0
    w_o = w_o0.copy()
    w = np.zeros(m)
    u = np.zeros(m)
    if code == 3:
        p_mat = np.eye(m) / eps
    else:
        p_mat = np.zeros((0, 0))
    ea_sq = np.zeros(n_samples)
    ok = 1
    for n in range(n_samples):
        if tracking and n > 0:
            for i in range(m):
                w_o[i] += incr[n, i]
        _shift_in(u, x[n])
        d = _dot(w_o, u) + v[n]
        y = _dot(w, u)
        e = d - y
        if not math.isfinite(e):
            ok = 0
            break
        ea = e - v[n]
        ea_sq[n] = ea * ea
        if code == 3:
            _rls_adapt(w, p_mat, u, e, mu)
        else:
            unorm = 0.0
            if code != 0:
                unorm = _dot(u, u)
            _filter_adapt(code, w, u, unorm, e, mu, eps, rho)
    return ea_sq, ok


@jit
def run_combo2(
    x,
    v,
    w_o0,
    incr,
    change_times,
    change_vecs,
    f1code, mu1, eps1, rho1,
    f2code, mu2, eps2, rho2,
    rule, act, mu_m, eta, eps_m, a_max, act_lo, act_scale,
    tr_code, tr_ell, tr_lam0, tr_n0,
    msd_stride,
):
    """One realization of a two-filter combination.

    Per-sample outputs (this run only; callers average across runs):
    squared a-priori errors of both components and the combination, their
    product, the squared overall error, the mixing parameter, and
    (strided) squared weight deviations of each component and of the
    combined weights.  ok=0 flags divergence.
    """
    n_samples = x.shape[0]
    m = w_o0.shape[0]
    tracking = incr.shape[0] > 0
    w_o = w_o0.copy()
    w1 = np.zeros(m)
    w2 = np.zeros(m)
    u = np.zeros(m)
    if f1code == 3:
        p1_mat = np.eye(m) / eps1
    else:
        p1_mat = np.zeros((0, 0))
    if f2code == 3:
        p2_mat = np.eye(m) / eps2
    else:
        p2_mat = np.zeros((0, 0))
    ea1_sq = np.zeros(n_samples)
    ea2_sq = np.zeros(n_samples)
    ea12 = np.zeros(n_samples)
    eac_sq = np.zeros(n_samples)
    e_sq = np.zeros(n_samples)
    lam_out = np.zeros(n_samples)
    if msd_stride > 0:
        n_msd = (n_samples + msd_stride - 1) // msd_stride
    else:
        n_msd = 0
    msd1 = np.zeros(n_msd)
    msd2 = np.zeros(n_msd)
    msdc = np.zeros(n_msd)
    lam = 0.5
    a = 0.0
    p = 0.0
    ci = 0
    ok = 1
    for n in range(n_samples):
        if tracking and n > 0:
            for i in range(m):
                w_o[i] += incr[n, i]
        if ci < change_times.shape[0] and n == change_times[ci]:
            for i in range(m):
                w_o[i] = change_vecs[ci, i]
            ci += 1
        _shift_in(u, x[n])
        d = _dot(w_o, u) + v[n]
        y1 = _dot(w1, u)
        y2 = _dot(w2, u)
        e1 = d - y1
        e2 = d - y2
        y = lam * y1 + (1.0 - lam) * y2
        e = d - y
        if not math.isfinite(e):
            ok = 0
            break
        ea1 = e1 - v[n]
        ea2 = e2 - v[n]
        eac = lam * ea1 + (1.0 - lam) * ea2
        ea1_sq[n] = ea1 * ea1
        ea2_sq[n] = ea2 * ea2
        ea12[n] = ea1 * ea2
        eac_sq[n] = eac * eac
        e_sq[n] = e * e
        lam_out[n] = lam
        if msd_stride > 0 and n % msd_stride == 0:
            k = n // msd_stride
            s1 = 0.0
            s2 = 0.0
            sc = 0.0
            for i in range(m):
                d1 = w_o[i] - w1[i]
                d2 = w_o[i] - w2[i]
                dc = w_o[i] - (lam * w1[i] + (1.0 - lam) * w2[i])
                s1 += d1 * d1
                s2 += d2 * d2
                sc += dc * dc
            msd1[k] = s1
            msd2[k] = s2
            msdc[k] = sc
        unorm = 0.0
        if f1code == 1 or f1code == 2 or f2code == 1 or f2code == 2:
            unorm = _dot(u, u)
        if f1code == 3:
            _rls_adapt(w1, p1_mat, u, e1, mu1)
        else:
            _filter_adapt(f1code, w1, u, unorm, e1, mu1, eps1, rho1)
        if f2code == 3:
            _rls_adapt(w2, p2_mat, u, e2, mu2)
        else:
            _filter_adapt(f2code, w2, u, unorm, e2, mu2, eps2, rho2)
        lam, a, p = _mixer_step(
            rule, act, lam, a, p, e, y1, y2, mu_m, eta, eps_m, a_max, act_lo, act_scale
        )
        if tr_code == 1:
            if lam >= tr_lam0:
                for i in range(m):
                    w2[i] = tr_ell * w2[i] + (1.0 - tr_ell) * w1[i]
        elif tr_code == 2:
            if lam >= tr_lam0 and n % tr_n0 == 0:
                for i in range(m):
                    w2[i] = w1[i]
        elif tr_code == 3:
            if n % tr_n0 == 0:
                for i in range(m):
                    wc = lam * w1[i] + (1.0 - lam) * w2[i]
                    w1[i] = wc
                    w2[i] = wc
    return ea1_sq, ea2_sq, ea12, eac_sq, e_sq, lam_out, msd1, msd2, msdc, ok


@jit
def _quantize_scalar(val, qstep, sat, sat_count):
    if val > sat:
        val = sat
        sat_count += 1
    elif val < -sat:
        val = -sat
        sat_count += 1
    val = qstep * math.floor(val / qstep + 0.5)
    if val > sat:
        val = sat
    elif val < -sat:
        val = -sat
    return val, sat_count


@jit
def run_lowcost(
    x,
    v,
    w_o0,
    incr,
    change_times,
    change_vecs,
    mu1, mu2,
    qstep, sat,
    rule, act, mu_m, eta, eps_m, a_max, act_lo, act_scale,
):
    """One realization of the difference-filter reduced-cost combination.

    The slow filter is never stored: only dw2 = w2 - w1 is kept, updated as
    dw2 <- dw2 + (mu2*e2 - mu1*e1)*u with e2 = e1 - u^T dw2, and quantized
    to the qstep grid (qstep = 0 disables quantization).  Returns the e2
    series (for the exact-equivalence oracle), squared a-priori errors,
    the mixing parameter, the saturation-event count, and a success flag.
    """
    n_samples = x.shape[0]
    m = w_o0.shape[0]
    tracking = incr.shape[0] > 0
    w_o = w_o0.copy()
    w1 = np.zeros(m)
    dw2 = np.zeros(m)
    u = np.zeros(m)
    e2_out = np.zeros(n_samples)
    ea1_sq = np.zeros(n_samples)
    ea2_sq = np.zeros(n_samples)
    eac_sq = np.zeros(n_samples)
    lam_out = np.zeros(n_samples)
    lam = 0.5
    a = 0.0
    p = 0.0
    ci = 0
    sat_count = 0
    ok = 1
    for n in range(n_samples):
        if tracking and n > 0:
            for i in range(m):
                w_o[i] += incr[n, i]
        if ci < change_times.shape[0] and n == change_times[ci]:
            for i in range(m):
                w_o[i] = change_vecs[ci, i]
            ci += 1
        _shift_in(u, x[n])
        d = _dot(w_o, u) + v[n]
        y1 = _dot(w1, u)
        e1 = d - y1
        dy2 = _dot(dw2, u)
        e2 = e1 - dy2
        y2 = d - e2
        e = lam * e1 + (1.0 - lam) * e2
        if not math.isfinite(e):
            ok = 0
            break
        e2_out[n] = e2
        ea1 = e1 - v[n]
        ea2 = e2 - v[n]
        eac = lam * ea1 + (1.0 - lam) * ea2
        ea1_sq[n] = ea1 * ea1
        ea2_sq[n] = ea2 * ea2
        eac_sq[n] = eac * eac
        lam_out[n] = lam
        g1 = mu1 * e1
        gd = mu2 * e2 - mu1 * e1
        if qstep > 0.0:
            for i in range(m):
                w1[i] += g1 * u[i]
                nval, sat_count = _quantize_scalar(dw2[i] + gd * u[i], qstep, sat, sat_count)
                dw2[i] = nval
        else:
            for i in range(m):
                w1[i] += g1 * u[i]
                dw2[i] += gd * u[i]
        lam, a, p = _mixer_step(
            rule, act, lam, a, p, e, y1, y2, mu_m, eta, eps_m, a_max, act_lo, act_scale
        )
    return e2_out, ea1_sq, ea2_sq, eac_sq, lam_out, sat_count, ok


@jit
def run_blockwise(
    x,
    v,
    w_o0,
    change_times,
    change_vecs,
    block_start,
    mu, eps,
    mu_a, eta, eps_m, a_max, act_lo, act_scale,
    msd_stride,
):
    """One realization of the block-wise shrinkage filter.

    The base filter adapts with the unbiased error d - sum(y_q); each
    block's shrinkage factor lambda_q is a convex combination against a
    constant-zero output, driven by the biased global error e = d - y.
    Returns strided squared deviations of the shrunk weights, the
    per-sample squared biased error, and a success flag.
    """
    n_samples = x.shape[0]
    m = w_o0.shape[0]
    nb = block_start.shape[0] - 1
    w_o = w_o0.copy()
    w = np.zeros(m)
    u = np.zeros(m)
    a_q = np.zeros(nb)
    p_q = np.zeros(nb)
    lam_q = np.full(nb, 0.5)
    y_q = np.zeros(nb)
    if msd_stride > 0:
        n_msd = (n_samples + msd_stride - 1) // msd_stride
    else:
        n_msd = 0
    msd = np.zeros(n_msd)
    e_sq = np.zeros(n_samples)
    ci = 0
    ok = 1
    for n in range(n_samples):
        if ci < change_times.shape[0] and n == change_times[ci]:
            for i in range(m):
                w_o[i] = change_vecs[ci, i]
            ci += 1
        _shift_in(u, x[n])
        d = _dot(w_o, u) + v[n]
        y = 0.0
        y_unb = 0.0
        for q in range(nb):
            acc = 0.0
            for i in range(block_start[q], block_start[q + 1]):
                acc += w[i] * u[i]
            y_q[q] = acc
            y_unb += acc
            y += lam_q[q] * acc
        e = d - y
        e_unb = d - y_unb
        if not math.isfinite(e):
            ok = 0
            break
        e_sq[n] = e * e
        if msd_stride > 0 and n % msd_stride == 0:
            s = 0.0
            for q in range(nb):
                for i in range(block_start[q], block_start[q + 1]):
                    dev = w_o[i] - lam_q[q] * w[i]
                    s += dev * dev
            msd[n // msd_stride] = s
        unorm = _dot(u, u)
        g = mu * e_unb / (eps + unorm)
        for i in range(m):
            w[i] += g * u[i]
        for q in range(nb):
            p_q[q] = eta * p_q[q] + (1.0 - eta) * y_q[q] * y_q[q]
            s = _sigmoid(a_q[q])
            grad = s * (1.0 - s)
            aa = a_q[q] + mu_a / (eps_m + p_q[q]) * grad * e * y_q[q]
            if aa > a_max:
                aa = a_max
            elif aa < -a_max:
                aa = -a_max
            a_q[q] = aa
            lam_q[q] = (_sigmoid(aa) - act_lo) * act_scale
    return msd, e_sq, ok


@jit
def run_echo(
    x,
    e0,
    gamma,
    h_a,
    h_b,
    rir_change,
    n1, n2,
    mu_l1, mu_l2, mu_q, mu_vf_l, mu_vf_q, eps,
    mu_a, eta, eps_m, a_max, act_lo, act_scale,
):
    """One realization of the nonlinear echo scenario with three cancellers.

    The echo path applies a memoryless distortion z = x + gamma(n) x^2 and
    a room impulse response that switches from h_a to h_b at rir_change.
    Three cancellers run on the same data: the combined-kernels scheme
    (two linear kernels mixed by lambda1, quadratic kernel gated against an
    all-zeros branch by lambda2), a linear-only combination, and a full
    second-order Volterra filter.  Each CK kernel adapts with its own
    output plus the combined output of the other order; the linear-only
    components adapt with their own errors; the Volterra kernels share the
    global error with their own steps (mu_vf_l, mu_vf_q) — the shared-error
    update is stable only while the normalized steps sum below one, so the
    Volterra baseline cannot reuse the per-kernel steps of the combined
    scheme.  Returns per-sample squared clean echo, squared residual echoes,
    and the CK mixing parameters.
    """
    n_samples = x.shape[0]
    l_rir = h_a.shape[0]
    m1 = n1
    m2 = n2
    nq = m2 * (m2 + 1) // 2
    zline = np.zeros(l_rir)
    uline = np.zeros(m1 if m1 > m2 else m2)
    phi = np.zeros(nq)
    # combined-kernels state
    wl1 = np.zeros(m1)
    wl2 = np.zeros(m1)
    wq = np.zeros(nq)
    lam1 = 0.5
    a1 = 0.0
    p1 = 0.0
    lam2 = 0.5
    a2 = 0.0
    p2 = 0.0
    # linear-only combination state
    vl1 = np.zeros(m1)
    vl2 = np.zeros(m1)
    laml = 0.5
    al = 0.0
    pl = 0.0
    # full Volterra state
    fl = np.zeros(m1)
    fq = np.zeros(nq)
    echo_sq = np.zeros(n_samples)
    res_ck = np.zeros(n_samples)
    res_lin = np.zeros(n_samples)
    res_vf = np.zeros(n_samples)
    lam1_out = np.zeros(n_samples)
    lam2_out = np.zeros(n_samples)
    ok = 1
    for n in range(n_samples):
        xn = x[n]
        _shift_in(zline, xn + gamma[n] * xn * xn)
        _shift_in(uline, xn)
        echo = 0.0
        if n < rir_change:
            for i in range(l_rir):
                echo += h_a[i] * zline[i]
        else:
            for i in range(l_rir):
                echo += h_b[i] * zline[i]
        d = echo + e0[n]
        k = 0
        for i in range(m2):
            for j in range(i, m2):
                phi[k] = uline[i] * uline[j]
                k += 1
        un = 0.0
        for i in range(m1):
            un += uline[i] * uline[i]
        pn = _dot(phi, phi)
        # combined kernels
        y11 = _dot(wl1, uline[:m1])
        y12 = _dot(wl2, uline[:m1])
        yq = _dot(wq, phi)
        ylin = lam1 * y11 + (1.0 - lam1) * y12
        ynl = lam2 * yq
        y = ylin + ynl
        e = d - y
        if not math.isfinite(e):
            ok = 0
            break
        echo_sq[n] = echo * echo
        r = echo - y
        res_ck[n] = r * r
        lam1_out[n] = lam1
        lam2_out[n] = lam2
        e11 = d - y11 - ynl
        e12 = d - y12 - ynl
        eq = d - yq - ylin
        g = mu_l1 * e11 / (eps + un)
        for i in range(m1):
            wl1[i] += g * uline[i]
        g = mu_l2 * e12 / (eps + un)
        for i in range(m1):
            wl2[i] += g * uline[i]
        g = mu_q * eq / (eps + pn)
        for i in range(nq):
            wq[i] += g * phi[i]
        lam1, a1, p1 = _mixer_step(
            3, 1, lam1, a1, p1, e, y11, y12, mu_a, eta, eps_m, a_max, act_lo, act_scale
        )
        lam2, a2, p2 = _mixer_step(
            3, 1, lam2, a2, p2, e, yq, 0.0, mu_a, eta, eps_m, a_max, act_lo, act_scale
        )
        # linear-only combination
        y1 = _dot(vl1, uline[:m1])
        y2 = _dot(vl2, uline[:m1])
        yl = laml * y1 + (1.0 - laml) * y2
        el = d - yl
        rl = echo - yl
        res_lin[n] = rl * rl
        e1 = d - y1
        e2 = d - y2
        g = mu_l1 * e1 / (eps + un)
        for i in range(m1):
            vl1[i] += g * uline[i]
        g = mu_l2 * e2 / (eps + un)
        for i in range(m1):
            vl2[i] += g * uline[i]
        laml, al, pl = _mixer_step(
            3, 1, laml, al, pl, el, y1, y2, mu_a, eta, eps_m, a_max, act_lo, act_scale
        )
        # full Volterra
        yfl = _dot(fl, uline[:m1])
        yfq = _dot(fq, phi)
        yf = yfl + yfq
        ef = d - yf
        rf = echo - yf
        res_vf[n] = rf * rf
        g = mu_vf_l * ef / (eps + un)
        for i in range(m1):
            fl[i] += g * uline[i]
        g = mu_vf_q * ef / (eps + pn)
        for i in range(nq):
            fq[i] += g * phi[i]
    return echo_sq, res_ck, res_lin, res_vf, lam1_out, lam2_out, ok
