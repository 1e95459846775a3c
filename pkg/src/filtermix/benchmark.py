"""Timing comparison of the compiled and pure-Python kernel backends.

The backend is chosen when ``filtermix._kernels`` is imported, so each
measurement runs in a fresh subprocess with ``FILTERMIX_NUMBA`` set
accordingly.  The workload is a two-filter combination ensemble; the
compiled run is warmed up once so compilation time is not counted.

Usage: ``python -m filtermix.benchmark [--samples N] [--runs K] [--m M]``
"""

import argparse
import json
import os
import subprocess
import sys

_CHILD = r"""
import json, sys, time
import filtermix._kernels  # selects the backend before timing
from filtermix._accel import HAS_NUMBA
from filtermix.scenario import FilterSpec, MixerSpec, combo2_ensemble

m, n_samples, runs = json.loads(sys.argv[1])
kwargs = dict(
    seed=2024, runs=runs, n_samples=n_samples, m=m,
    f1=FilterSpec("nlms", 0.5), f2=FilterSpec("nlms", 0.05),
    mixer=MixerSpec("cvx-pn-lms", 1.0), sigma_v2=1e-2,
)
combo2_ensemble(**{**kwargs, "runs": 1, "n_samples": min(n_samples, 2000)})
t0 = time.perf_counter()
combo2_ensemble(**kwargs)
elapsed = time.perf_counter() - t0
print(json.dumps({"numba": HAS_NUMBA, "seconds": elapsed}))
"""


def _measure(use_numba, m, n_samples, runs):
    env = dict(os.environ, FILTERMIX_NUMBA="1" if use_numba else "0")
    out = subprocess.run(
        [sys.executable, "-c", _CHILD, json.dumps([m, n_samples, runs])],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Compare compiled and pure-Python kernel backends.")
    parser.add_argument("--m", type=int, default=7, help="filter length")
    parser.add_argument("--samples", type=int, default=50_000,
                        help="samples per run")
    parser.add_argument("--runs", type=int, default=5,
                        help="independent runs in the ensemble")
    args = parser.parse_args(argv)

    results = {}
    for use_numba in (True, False):
        label = "numba" if use_numba else "python"
        res = _measure(use_numba, args.m, args.samples, args.runs)
        if use_numba and not res["numba"]:
            print("note: numba unavailable; both rows use the fallback",
                  file=sys.stderr)
        results[label] = res["seconds"]
        print(f"{label:>7}: {res['seconds']:8.3f} s "
              f"({args.runs} runs x {args.samples} samples, m={args.m})")
    if results["numba"] > 0:
        print(f"speedup: {results['python'] / results['numba']:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
