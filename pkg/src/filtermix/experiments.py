"""Configuration-driven experiments with CSV output.

Each experiment id maps to a flat key-value schema and a runner.  Configs
are plain dictionaries (the CLI loads them from YAML, one experiment per
file); ``validate_config`` applies defaults, casts values, and aggregates
human-readable errors.  Runners return (header, rows) and every run
writes exactly one CSV: UTF-8, LF line endings, header first, floats in
shortest round-trip form, so a given (config, seed) pair always produces
a byte-identical file.

Experiment ids
--------------
steady-nsd        two-filter combination on a random-walk plant, steady
                  NSD vs Tr{Q}, with closed-form curves when available
affine-gain       closed-form NSD of affine/convex mixtures of two
                  nearly identical step sizes (no simulation; the near-
                  degenerate difference signal makes ensembles of this
                  scenario numerically unrepresentative)
lms-rls-tracking  optimally tuned LMS + RLS against the increment-
                  covariance mixture sweep, theory plus optional
                  simulation
convergence       EMSE learning curves of a combination and its members,
                  with the per-sample optimal-mixture reference
pn-robustness     steady NSD of the plain vs power-normalized convex
                  rules across a Tr{Q} sweep
transfer          learning curves with and without a weight-transfer
                  policy around an abrupt plant change
lowcost           difference-filter combination at several coefficient
                  wordlengths, plus the exact-equivalence diagnostic
sparse            MSD of the sparse-plant schemes: NLMS + zero-attracting
                  NLMS combination and block-wise shrinkage
echo              ERLE of the combined-kernels echo canceller vs the
                  linear-only combination and the full Volterra filter
theory-tables     optimal step sizes and EMSEs over a Tr{Q} grid
"""

import csv
import math
import os

import numpy as np

from . import scenario, theory
from .combo import RULES
from .scenario import FilterSpec, MixerSpec
from .transfer import TransferPolicy

__all__ = ["EXPERIMENTS", "ConfigError", "validate_config", "run_config"]


class ConfigError(ValueError):
    """Raised with the full list of config problems."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


_REQUIRED = object()


def _float_list(v):
    if not isinstance(v, (list, tuple)) or not v:
        raise TypeError("expected a non-empty list of numbers")
    return [float(x) for x in v]


def _int_list(v):
    if not isinstance(v, (list, tuple)) or not v:
        raise TypeError("expected a non-empty list of integers")
    return [int(x) for x in v]


def _positive(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _fraction(x):
    return 0.0 < x <= 1.0


def _unit(x):
    return 0.0 <= x < 1.0


# (caster, default, predicate, description) — default _REQUIRED means the
# key must be present; a predicate failure reports the description.
_COMMON = {
    "experiment": (str, _REQUIRED, None, ""),
    "name": (str, None, None, ""),
    "seed": (int, 12345, None, ""),
}

_MIXER_KEYS = {
    "mixer_rule": (str, "cvx-pn-lms", lambda r: r in RULES,
                   f"one of {RULES}"),
    "mixer_mu": (float, 1.0, _positive, "> 0"),
    "mixer_eta": (float, 0.9, _unit, "in [0, 1)"),
    "mixer_eps": (float, 1e-8, _positive, "> 0"),
    "a_max": (float, 4.0, _positive, "> 0"),
}

_PAIR_KEYS = {
    "f1_kind": (str, "lms", lambda k: k in ("lms", "nlms", "za-nlms", "rls"),
                "a known filter kind"),
    "f1_mu": (float, _REQUIRED, _positive, "> 0"),
    "f1_rho": (float, 0.0, _nonneg, ">= 0"),
    "f2_kind": (str, "lms", lambda k: k in ("lms", "nlms", "za-nlms", "rls"),
                "a known filter kind"),
    "f2_mu": (float, _REQUIRED, _positive, "> 0"),
    "f2_rho": (float, 0.0, _nonneg, ">= 0"),
}

_SIGNAL_KEYS = {
    "m": (int, _REQUIRED, _positive, "> 0"),
    "input_kind": (str, "white", lambda k: k in ("white", "ar1"), "white or ar1"),
    "input_var": (float, 1.0, _positive, "> 0"),
    "ar_coeff": (float, 0.0, lambda a: -1.0 < a < 1.0, "in (-1, 1)"),
    "sigma_v2": (float, _REQUIRED, _positive, "> 0"),
    "w_o_norm2": (float, 1.0, _positive, "> 0"),
}

_SCHEMAS = {
    "steady-nsd": {
        **_COMMON, **_SIGNAL_KEYS, **_PAIR_KEYS, **_MIXER_KEYS,
        "runs": (int, 100, _positive, "> 0"),
        "horizon": (int, _REQUIRED, _positive, "> 0"),
        "steady_frac": (float, 0.2, _fraction, "in (0, 1]"),
        "q_kind": (str, "identity", lambda k: k in ("identity", "mixture"),
                   "identity or mixture"),
        "q_alpha": (float, 0.5, lambda a: 0.0 <= a <= 1.0, "in [0, 1]"),
        "trq_values": (_float_list, _REQUIRED, lambda v: all(x > 0 for x in v),
                       "all > 0"),
    },
    "affine-gain": {
        **_COMMON,
        "mu1": (float, _REQUIRED, _positive, "> 0"),
        "mu2": (float, _REQUIRED, _positive, "> 0"),
        "trr": (float, 1.0, _positive, "> 0"),
        "sigma_v2": (float, _REQUIRED, _positive, "> 0"),
        "trq_values": (_float_list, _REQUIRED, lambda v: all(x > 0 for x in v),
                       "all > 0"),
    },
    "lms-rls-tracking": {
        **_COMMON, **_SIGNAL_KEYS, **_MIXER_KEYS,
        "runs": (int, 0, _nonneg, ">= 0 (0 = closed form only)"),
        "horizon": (int, 20000, _positive, "> 0"),
        "steady_frac": (float, 0.2, _fraction, "in (0, 1]"),
        "q_scale": (float, 1e-5, _positive, "> 0"),
        "alpha_values": (_float_list, _REQUIRED,
                         lambda v: all(0.0 <= x <= 1.0 for x in v), "all in [0, 1]"),
    },
    "convergence": {
        **_COMMON, **_SIGNAL_KEYS, **_PAIR_KEYS, **_MIXER_KEYS,
        "runs": (int, 100, _positive, "> 0"),
        "horizon": (int, _REQUIRED, _positive, "> 0"),
        "output_stride": (int, 10, _positive, "> 0"),
    },
    "pn-robustness": {
        **_COMMON, **_SIGNAL_KEYS,
        "runs": (int, 100, _positive, "> 0"),
        "horizon": (int, _REQUIRED, _positive, "> 0"),
        "steady_frac": (float, 0.2, _fraction, "in (0, 1]"),
        "f1_mu": (float, _REQUIRED, _positive, "> 0"),
        "f2_mu": (float, _REQUIRED, _positive, "> 0"),
        "mu_a_plain": (float, 1000.0, _positive, "> 0"),
        "mu_a_pn": (float, 1.0, _positive, "> 0"),
        "mixer_eta": (float, 0.9, _unit, "in [0, 1)"),
        "a_max": (float, 4.0, _positive, "> 0"),
        "trq_values": (_float_list, _REQUIRED, lambda v: all(x > 0 for x in v),
                       "all > 0"),
    },
    "transfer": {
        **_COMMON, **_SIGNAL_KEYS, **_PAIR_KEYS, **_MIXER_KEYS,
        "runs": (int, 100, _positive, "> 0"),
        "horizon": (int, _REQUIRED, _positive, "> 0"),
        "change_time": (int, _REQUIRED, _positive, "> 0"),
        "change_mode": (str, "fresh", lambda k: k in ("fresh", "sign-flip"),
                        "fresh or sign-flip"),
        "policy": (str, "copy", lambda k: k in ("gradual", "copy", "feedback"),
                   "gradual, copy, or feedback"),
        "ell": (float, 0.9, lambda x: 0.0 < x < 1.0, "in (0, 1)"),
        "lam0": (float, 0.982, lambda x: 0.0 < x < 1.0, "in (0, 1)"),
        "n0": (int, 2, lambda x: x >= 2, ">= 2"),
        "output_stride": (int, 10, _positive, "> 0"),
    },
    "lowcost": {
        **_COMMON, **_SIGNAL_KEYS, **_MIXER_KEYS,
        "runs": (int, 100, _positive, "> 0"),
        "horizon": (int, _REQUIRED, _positive, "> 0"),
        "steady_frac": (float, 0.2, _fraction, "in (0, 1]"),
        "mu1": (float, _REQUIRED, _positive, "> 0"),
        "mu2": (float, _REQUIRED, _positive, "> 0"),
        "bits_values": (_int_list, _REQUIRED, lambda v: all(x >= 0 for x in v),
                        "all >= 0 (0 = full precision)"),
        "sat": (float, 1.0, _positive, "> 0"),
        "equivalence_steps": (int, 10000, _positive, "> 0"),
    },
    "sparse": {
        **_COMMON,
        "m": (int, _REQUIRED, _positive, "> 0"),
        "sigma_v2": (float, _REQUIRED, _positive, "> 0"),
        "w_o_norm2": (float, 1.0, _positive, "> 0"),
        "runs": (int, 100, _positive, "> 0"),
        "horizon": (int, _REQUIRED, _positive, "> 0"),
        "segment_times": (_int_list, _REQUIRED,
                          lambda v: v[0] == 0 and all(b > a for a, b in zip(v, v[1:])),
                          "strictly increasing, starting at 0"),
        "segment_active": (_int_list, _REQUIRED, lambda v: all(x > 0 for x in v),
                           "all > 0"),
        "mu": (float, 0.5, _positive, "> 0"),
        "rho": (float, 1e-6, _nonneg, ">= 0"),
        "mixer_mu": (float, 1.0, _positive, "> 0"),
        "shrink_mu_a": (float, 1.0, _positive, "> 0"),
        "shrink_eps": (float, 1e-3, _positive, "> 0"),
        "q_values": (_int_list, _REQUIRED, lambda v: all(x >= 1 for x in v),
                     "all >= 1"),
        "msd_stride": (int, 100, _positive, "> 0"),
    },
    "echo": {
        **_COMMON,
        "runs": (int, 100, _positive, "> 0"),
        "n_samples": (int, _REQUIRED, _positive, "> 0"),
        "n1": (int, 32, _positive, "> 0"),
        "n2": (int, 16, _positive, "> 0"),
        "rir_len": (int, 32, _positive, "> 0"),
        "rir_change": (int, 0, _nonneg, ">= 0 (0 = mid-run)"),
        "segment_starts": (_int_list, _REQUIRED,
                           lambda v: v[0] == 0 and all(b > a for a, b in zip(v, v[1:])),
                           "strictly increasing, starting at 0"),
        "lnlr_db": (_float_list, _REQUIRED, None, ""),
        "ar_coeff": (float, 0.8, lambda a: -1.0 < a < 1.0, "in (-1, 1)"),
        "enr_db": (float, 30.0, None, ""),
        "mu_l1": (float, 1.0, _positive, "> 0"),
        "mu_l2": (float, 0.1, _positive, "> 0"),
        "mu_q": (float, 0.5, _positive, "> 0"),
        "mu_vf_l": (float, 0.5, _positive, "> 0"),
        "mu_vf_q": (float, 0.25, _positive, "> 0"),
        "mixer_mu": (float, 0.25, _positive, "> 0"),
        "erle_window": (int, 2000, _positive, "> 0"),
        "output_stride": (int, 50, _positive, "> 0"),
    },
    "theory-tables": {
        **_COMMON,
        "m": (int, _REQUIRED, _positive, "> 0"),
        "sigma_v2": (float, _REQUIRED, _positive, "> 0"),
        "trr": (float, 1.0, _positive, "> 0"),
        "trq_values": (_float_list, _REQUIRED, lambda v: all(x > 0 for x in v),
                       "all > 0"),
    },
}

# Keys that fall back to a default with a warning rather than silently.
_WARN_DEFAULTS = {"runs"}


def validate_config(raw):
    """Normalize a raw config dict.

    Returns (config, warnings); raises ConfigError listing every problem.
    """
    errors = []
    warnings = []
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a mapping of keys to values"])
    exp = raw.get("experiment")
    if exp not in _SCHEMAS:
        raise ConfigError(
            [f"unknown experiment {exp!r}; expected one of {sorted(_SCHEMAS)}"])
    schema = _SCHEMAS[exp]
    cfg = {}
    for key, value in raw.items():
        if key not in schema:
            errors.append(f"unknown key {key!r} for experiment {exp}")
    for key, (cast, default, check, desc) in schema.items():
        if key in raw:
            try:
                value = cast(raw[key])
            except (TypeError, ValueError) as exc:
                errors.append(f"{key}: {exc}")
                continue
        elif default is _REQUIRED:
            errors.append(f"missing required key {key!r}")
            continue
        else:
            value = default
            if key in _WARN_DEFAULTS:
                warnings.append(f"{key} not given, defaulting to {default}")
        if value is not None and check is not None and not check(value):
            errors.append(f"{key}={value!r} out of range: must be {desc}")
            continue
        cfg[key] = value
    if errors:
        raise ConfigError(errors)
    if cfg.get("name") is None:
        cfg["name"] = exp
    if exp == "sparse" and len(cfg["segment_times"]) != len(cfg["segment_active"]):
        raise ConfigError(["segment_times and segment_active lengths differ"])
    if exp == "echo" and len(cfg["segment_starts"]) != len(cfg["lnlr_db"]):
        raise ConfigError(["segment_starts and lnlr_db lengths differ"])
    return cfg, warnings


# ---------------------------------------------------------------------------
# CSV output


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    x = float(v)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_csv(path, header, rows):
    """UTF-8, LF-terminated CSV with shortest round-trip float formatting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------------------
# shared pieces


def _mixer_from(cfg):
    return MixerSpec(cfg["mixer_rule"], cfg["mixer_mu"], eta=cfg["mixer_eta"],
                     eps=cfg["mixer_eps"], a_max=cfg["a_max"])


def _pair_from(cfg):
    f1 = FilterSpec(cfg["f1_kind"], cfg["f1_mu"], rho=cfg["f1_rho"])
    f2 = FilterSpec(cfg["f2_kind"], cfg["f2_mu"], rho=cfg["f2_rho"])
    return f1, f2


def _steady(series, frac):
    n = len(series)
    k = max(1, int(round(n * frac)))
    return float(np.mean(series[-k:]))


def _make_q(m, r, q_kind, trq, alpha):
    if q_kind == "identity":
        return (trq / m) * np.eye(m)
    return scenario.q_mixture(r, alpha, scale=trq)


def _theory_pair(kind):
    return kind if kind in ("lms", "rls") else None


# ---------------------------------------------------------------------------
# runners


def _run_steady_nsd(cfg):
    m = cfg["m"]
    r = scenario.input_correlation(m, cfg["input_kind"], cfg["input_var"],
                                   cfg["ar_coeff"])
    f1, f2 = _pair_from(cfg)
    mixer = _mixer_from(cfg)
    k1, k2 = _theory_pair(cfg["f1_kind"]), _theory_pair(cfg["f2_kind"])
    header = ["trq", "zeta_f1", "zeta_f2", "zeta_comb", "lambda_mean",
              "zeta_opt_lms", "nsd_f1_db", "nsd_f2_db", "nsd_comb_db",
              "nsd_f1_theory_db", "nsd_f2_theory_db",
              "nsd_cvx_theory_db", "nsd_aff_theory_db"]
    rows = []
    for trq in cfg["trq_values"]:
        q = _make_q(m, r, cfg["q_kind"], trq, cfg["q_alpha"])
        out = scenario.combo2_ensemble(
            seed=cfg["seed"], runs=cfg["runs"], n_samples=cfg["horizon"], m=m,
            f1=f1, f2=f2, mixer=mixer, sigma_v2=cfg["sigma_v2"],
            input_kind=cfg["input_kind"], input_var=cfg["input_var"],
            ar_coeff=cfg["ar_coeff"], w_o_norm2=cfg["w_o_norm2"], q=q)
        frac = cfg["steady_frac"]
        z1 = _steady(out["z1"], frac)
        z2 = _steady(out["z2"], frac)
        zc = _steady(out["zc"], frac)
        lam = _steady(out["lam"], frac)
        zeta_opt = math.sqrt(cfg["sigma_v2"] * float(np.trace(r)) * trq)
        if k1 and k2:
            spec = theory.TrackingSpec(cfg["sigma_v2"], r, q)
            z1t = theory.lms_emse(f1.mu, spec) if k1 == "lms" else theory.rls_emse(f1.mu, spec)
            z2t = theory.lms_emse(f2.mu, spec) if k2 == "lms" else theory.rls_emse(f2.mu, spec)
            z12t = theory.cross_emse((k1, f1.mu), (k2, f2.mu), spec)
            cvx = theory.optimal_emse(z1t, z2t, z12t, mode="convex")
            aff = theory.optimal_emse(z1t, z2t, z12t, mode="affine")
            theory_cols = [theory.nsd(z1t, zeta_opt), theory.nsd(z2t, zeta_opt),
                           theory.nsd(cvx, zeta_opt), theory.nsd(aff, zeta_opt)]
        else:
            theory_cols = [math.nan] * 4
        rows.append([trq, z1, z2, zc, lam, zeta_opt,
                     theory.nsd(z1, zeta_opt), theory.nsd(z2, zeta_opt),
                     theory.nsd(zc, zeta_opt), *theory_cols])
    return header, rows


def _run_affine_gain(cfg):
    header = ["trq", "zeta_f1", "zeta_f2", "zeta_cross", "zeta_opt_lms",
              "nsd_f1_db", "nsd_f2_db", "nsd_aff_db", "nsd_cvx_db",
              "lambda_aff", "lambda_cvx", "regime"]
    rows = []
    r = np.array([[cfg["trr"]]])
    for trq in cfg["trq_values"]:
        spec = theory.TrackingSpec(cfg["sigma_v2"], r, np.array([[trq]]))
        z1 = theory.lms_emse(cfg["mu1"], spec)
        z2 = theory.lms_emse(cfg["mu2"], spec)
        z12 = theory.cross_emse(("lms", cfg["mu1"]), ("lms", cfg["mu2"]), spec)
        zeta_opt = math.sqrt(cfg["sigma_v2"] * cfg["trr"] * trq)
        aff = theory.optimal_emse(z1, z2, z12, mode="affine")
        cvx = theory.optimal_emse(z1, z2, z12, mode="convex")
        rows.append([trq, z1, z2, z12, zeta_opt,
                     theory.nsd(z1, zeta_opt), theory.nsd(z2, zeta_opt),
                     theory.nsd(aff, zeta_opt), theory.nsd(cvx, zeta_opt),
                     theory.optimal_lambda(z1, z2, z12, mode="affine"),
                     theory.optimal_lambda(z1, z2, z12, mode="convex"),
                     theory.classify_regime(z1, z2, z12)])
    return header, rows


def _run_lms_rls_tracking(cfg):
    m = cfg["m"]
    r = scenario.input_correlation(m, cfg["input_kind"], cfg["input_var"],
                                   cfg["ar_coeff"])
    header = ["alpha", "mu_opt", "beta_opt", "zeta_lms_opt", "zeta_rls_opt",
              "zeta_cross", "zeta_comb_theory", "lambda_opt", "margin_db",
              "regime", "sim_zeta_lms", "sim_zeta_rls", "sim_zeta_comb",
              "sim_lambda_mean"]
    rows = []
    for alpha in cfg["alpha_values"]:
        q = scenario.q_mixture(r, alpha, scale=cfg["q_scale"])
        spec = theory.TrackingSpec(cfg["sigma_v2"], r, q)
        opt = theory.optimal_params(spec)
        z12 = theory.cross_emse(("lms", opt.mu_opt), ("rls", opt.beta_opt), spec)
        zc = theory.optimal_emse(opt.emse_lms, opt.emse_rls, z12, mode="convex")
        lam = theory.optimal_lambda(opt.emse_lms, opt.emse_rls, z12, mode="convex")
        margin = 10.0 * math.log10(min(opt.emse_lms, opt.emse_rls) / zc)
        regime = theory.classify_regime(opt.emse_lms, opt.emse_rls, z12)
        sim_cols = [math.nan] * 4
        if cfg["runs"] > 0:
            out = scenario.combo2_ensemble(
                seed=cfg["seed"], runs=cfg["runs"], n_samples=cfg["horizon"],
                m=m, f1=FilterSpec("lms", opt.mu_opt),
                f2=FilterSpec("rls", opt.beta_opt), mixer=_mixer_from(cfg),
                sigma_v2=cfg["sigma_v2"], input_kind=cfg["input_kind"],
                input_var=cfg["input_var"], ar_coeff=cfg["ar_coeff"],
                w_o_norm2=cfg["w_o_norm2"], q=q)
            frac = cfg["steady_frac"]
            sim_cols = [_steady(out["z1"], frac), _steady(out["z2"], frac),
                        _steady(out["zc"], frac), _steady(out["lam"], frac)]
        rows.append([alpha, opt.mu_opt, opt.beta_opt, opt.emse_lms,
                     opt.emse_rls, z12, zc, lam, margin, regime, *sim_cols])
    return header, rows


def _run_convergence(cfg):
    m = cfg["m"]
    f1, f2 = _pair_from(cfg)
    out = scenario.combo2_ensemble(
        seed=cfg["seed"], runs=cfg["runs"], n_samples=cfg["horizon"], m=m,
        f1=f1, f2=f2, mixer=_mixer_from(cfg), sigma_v2=cfg["sigma_v2"],
        input_kind=cfg["input_kind"], input_var=cfg["input_var"],
        ar_coeff=cfg["ar_coeff"], w_o_norm2=cfg["w_o_norm2"])
    _, z_opt = scenario.convex_reference(out["z1"], out["z2"], out["z12"])
    stride = cfg["output_stride"]
    idx = np.arange(0, cfg["horizon"], stride)
    header = ["n", "emse_f1_db", "emse_f2_db", "emse_comb_db", "emse_opt_db",
              "lambda_mean"]
    rows = [[int(n), scenario.to_db(out["z1"][n]), scenario.to_db(out["z2"][n]),
             scenario.to_db(out["zc"][n]), scenario.to_db(z_opt[n]),
             out["lam"][n]] for n in idx]
    return header, rows


def _run_pn_robustness(cfg):
    m = cfg["m"]
    f1 = FilterSpec("nlms", cfg["f1_mu"])
    f2 = FilterSpec("nlms", cfg["f2_mu"])
    plain = MixerSpec("cvx-lms", cfg["mu_a_plain"], eta=cfg["mixer_eta"],
                      a_max=cfg["a_max"])
    pn = MixerSpec("cvx-pn-lms", cfg["mu_a_pn"], eta=cfg["mixer_eta"],
                   a_max=cfg["a_max"])
    header = ["trq", "zeta_f1", "zeta_f2", "zeta_opt_lms", "nsd_f1_db",
              "nsd_f2_db", "nsd_plain_db", "nsd_pn_db",
              "lambda_mean_plain", "lambda_mean_pn"]
    rows = []
    trr = m * cfg["input_var"]
    for trq in cfg["trq_values"]:
        q = (trq / m) * np.eye(m)
        common = dict(seed=cfg["seed"], runs=cfg["runs"],
                      n_samples=cfg["horizon"], m=m, f1=f1, f2=f2,
                      sigma_v2=cfg["sigma_v2"], input_kind=cfg["input_kind"],
                      input_var=cfg["input_var"], ar_coeff=cfg["ar_coeff"],
                      w_o_norm2=cfg["w_o_norm2"], q=q)
        out_pn = scenario.combo2_ensemble(mixer=pn, **common)
        out_plain = scenario.combo2_ensemble(mixer=plain, **common)
        frac = cfg["steady_frac"]
        z1 = _steady(out_pn["z1"], frac)
        z2 = _steady(out_pn["z2"], frac)
        zeta_opt = math.sqrt(cfg["sigma_v2"] * trr * trq)
        rows.append([trq, z1, z2, zeta_opt,
                     theory.nsd(z1, zeta_opt), theory.nsd(z2, zeta_opt),
                     theory.nsd(_steady(out_plain["zc"], frac), zeta_opt),
                     theory.nsd(_steady(out_pn["zc"], frac), zeta_opt),
                     _steady(out_plain["lam"], frac),
                     _steady(out_pn["lam"], frac)])
    return header, rows


def _run_transfer(cfg):
    m = cfg["m"]
    f1, f2 = _pair_from(cfg)
    mixer = _mixer_from(cfg)
    policy = TransferPolicy(cfg["policy"], ell=cfg["ell"], lam0=cfg["lam0"],
                            n0=cfg["n0"])
    common = dict(seed=cfg["seed"], runs=cfg["runs"], n_samples=cfg["horizon"],
                  m=m, f1=f1, f2=f2, mixer=mixer, sigma_v2=cfg["sigma_v2"],
                  input_kind=cfg["input_kind"], input_var=cfg["input_var"],
                  ar_coeff=cfg["ar_coeff"], w_o_norm2=cfg["w_o_norm2"],
                  changes=((cfg["change_time"], cfg["change_mode"]),))
    base = scenario.combo2_ensemble(**common)
    with_tr = scenario.combo2_ensemble(transfer=policy, **common)
    stride = cfg["output_stride"]
    idx = np.arange(0, cfg["horizon"], stride)
    header = ["n", "emse_comb_db", "emse_comb_transfer_db", "emse_f1_db",
              "emse_f2_db", "lambda_mean", "lambda_mean_transfer"]
    rows = [[int(n), scenario.to_db(base["zc"][n]),
             scenario.to_db(with_tr["zc"][n]), scenario.to_db(base["z1"][n]),
             scenario.to_db(base["z2"][n]), base["lam"][n],
             with_tr["lam"][n]] for n in idx]
    return header, rows


def _run_lowcost(cfg):
    m = cfg["m"]
    mixer = _mixer_from(cfg)
    frac = cfg["steady_frac"]
    header = ["bits", "emse_comb_db", "degradation_db", "sat_count",
              "lambda_mean", "e2_max_dev"]
    rows = []
    base_db = None
    for bits in cfg["bits_values"]:
        out = scenario.lowcost_ensemble(
            seed=cfg["seed"], runs=cfg["runs"], n_samples=cfg["horizon"], m=m,
            mu1=cfg["mu1"], mu2=cfg["mu2"], mixer=mixer,
            sigma_v2=cfg["sigma_v2"], input_kind=cfg["input_kind"],
            input_var=cfg["input_var"], ar_coeff=cfg["ar_coeff"],
            w_o_norm2=cfg["w_o_norm2"], coeff_bits=bits, sat=cfg["sat"])
        emse_db = scenario.to_db(_steady(out["zc"], frac))
        if bits == 0:
            base_db = emse_db
            dev = _equivalence_deviation(cfg)
        else:
            dev = math.nan
        degradation = math.nan if base_db is None else emse_db - base_db
        rows.append([bits, emse_db, degradation, out["sat_count"],
                     _steady(out["lam"], frac), dev])
    return header, rows


def _equivalence_deviation(cfg):
    """Max |e2 - direct-LMS e2| over the first equivalence_steps samples."""
    n = min(cfg["equivalence_steps"], cfg["horizon"])
    single = scenario.lowcost_single_run(
        seed=cfg["seed"], run_index=0, n_samples=n, m=cfg["m"],
        mu1=cfg["mu1"], mu2=cfg["mu2"], mixer=_mixer_from(cfg),
        sigma_v2=cfg["sigma_v2"], input_kind=cfg["input_kind"],
        input_var=cfg["input_var"], ar_coeff=cfg["ar_coeff"],
        w_o_norm2=cfg["w_o_norm2"], coeff_bits=0)
    x, v, w_o = single["x"], single["v"], single["w_o"]
    m = cfg["m"]
    w2 = np.zeros(m)
    u = np.zeros(m)
    worst = 0.0
    for k in range(n):
        u[1:] = u[:-1]
        u[0] = x[k]
        d = float(w_o @ u) + v[k]
        e2 = d - float(w2 @ u)
        worst = max(worst, abs(e2 - single["e2"][k]))
        w2 = w2 + cfg["mu2"] * e2 * u
    return worst


def _run_sparse(cfg):
    m = cfg["m"]
    plants = [scenario.sparse_plant(cfg["seed"], m, act, norm2=cfg["w_o_norm2"],
                                    tag=i)
              for i, act in enumerate(cfg["segment_active"])]
    segments = list(zip(cfg["segment_times"], plants))
    changes = tuple(segments[1:])
    a = scenario.combo2_ensemble(
        seed=cfg["seed"], runs=cfg["runs"], n_samples=cfg["horizon"], m=m,
        f1=FilterSpec("nlms", cfg["mu"]),
        f2=FilterSpec("za-nlms", cfg["mu"], rho=cfg["rho"]),
        mixer=MixerSpec("cvx-pn-lms", cfg["mixer_mu"]),
        sigma_v2=cfg["sigma_v2"], w_o=plants[0], changes=changes,
        msd_stride=cfg["msd_stride"])
    b_runs = {}
    for nq in cfg["q_values"]:
        b = scenario.blockwise_ensemble(
            seed=cfg["seed"], runs=cfg["runs"], n_samples=cfg["horizon"], m=m,
            n_blocks=nq, mu=cfg["mu"], mixer_mu=cfg["shrink_mu_a"],
            mixer_eps=cfg["shrink_eps"],
            sigma_v2=cfg["sigma_v2"], segments=segments,
            msd_stride=cfg["msd_stride"])
        b_runs[nq] = b
    header = ["n", "msd_nlms_db", "msd_zanlms_db", "msd_schemeA_db"] + [
        f"msd_schemeB_q{nq}_db" for nq in cfg["q_values"]]
    rows = []
    for i, n in enumerate(a["msd_times"]):
        row = [int(n), scenario.to_db(a["msd1"][i]), scenario.to_db(a["msd2"][i]),
               scenario.to_db(a["msdc"][i])]
        row += [scenario.to_db(b_runs[nq]["msd"][i]) for nq in cfg["q_values"]]
        rows.append(row)
    return header, rows


def _run_echo(cfg):
    rir_change = cfg["rir_change"] if cfg["rir_change"] > 0 else cfg["n_samples"] // 2
    out = scenario.echo_ensemble(
        seed=cfg["seed"], runs=cfg["runs"], n_samples=cfg["n_samples"],
        n1=cfg["n1"], n2=cfg["n2"], rir_len=cfg["rir_len"],
        rir_change=rir_change, segment_starts=tuple(cfg["segment_starts"]),
        lnlr_db_segments=tuple(cfg["lnlr_db"]), ar_coeff=cfg["ar_coeff"],
        enr_db=cfg["enr_db"], mu_l1=cfg["mu_l1"], mu_l2=cfg["mu_l2"],
        mu_q=cfg["mu_q"], mu_vf_l=cfg["mu_vf_l"], mu_vf_q=cfg["mu_vf_q"],
        mixer_mu=cfg["mixer_mu"])
    w = cfg["erle_window"]
    echo = scenario.moving_average(out["echo_sq"], w)
    series = {k: scenario.moving_average(out[k], w)
              for k in ("res_ck", "res_lin", "res_vf")}
    idx = np.arange(0, cfg["n_samples"], cfg["output_stride"])
    header = ["n", "erle_ck_db", "erle_lin_db", "erle_vf_db",
              "lambda1_mean", "lambda2_mean"]
    rows = [[int(n),
             scenario.to_db(echo[n] / series["res_ck"][n]),
             scenario.to_db(echo[n] / series["res_lin"][n]),
             scenario.to_db(echo[n] / series["res_vf"][n]),
             out["lam1"][n], out["lam2"][n]] for n in idx]
    return header, rows


def _run_theory_tables(cfg):
    m = cfg["m"]
    r = (cfg["trr"] / m) * np.eye(m)
    header = ["trq", "mu_opt", "beta_opt", "zeta_lms_opt", "zeta_rls_opt"]
    rows = []
    for trq in cfg["trq_values"]:
        spec = theory.TrackingSpec(cfg["sigma_v2"], r, (trq / m) * np.eye(m))
        opt = theory.optimal_params(spec)
        rows.append([trq, opt.mu_opt, opt.beta_opt, opt.emse_lms, opt.emse_rls])
    return header, rows


EXPERIMENTS = {
    "steady-nsd": _run_steady_nsd,
    "affine-gain": _run_affine_gain,
    "lms-rls-tracking": _run_lms_rls_tracking,
    "convergence": _run_convergence,
    "pn-robustness": _run_pn_robustness,
    "transfer": _run_transfer,
    "lowcost": _run_lowcost,
    "sparse": _run_sparse,
    "echo": _run_echo,
    "theory-tables": _run_theory_tables,
}


def run_config(raw, out_dir, runs=None, seed=None):
    """Validate and execute a config; returns (csv_path, warnings)."""
    cfg, warnings = validate_config(raw)
    if runs is not None:
        if "runs" not in _SCHEMAS[cfg["experiment"]]:
            raise ConfigError(["this experiment takes no runs override"])
        cfg["runs"] = int(runs)
    if seed is not None:
        cfg["seed"] = int(seed)
    header, rows = EXPERIMENTS[cfg["experiment"]](cfg)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, cfg["name"] + ".csv")
    write_csv(path, header, rows)
    return path, warnings
