"""Optional numba acceleration with a pure-Python fallback.

Hot per-sample loops live in ``filtermix._kernels`` and are compiled with
numba when it is importable and the ``FILTERMIX_NUMBA`` environment variable
is not set to a falsy value ("0", "false", "no", "off").  The fallback runs
the exact same Python source, so both backends execute the same floating
point operation sequence; it is meant for debugging and small unit tests,
not for full-size experiments.

``FILTERMIX_THREADS`` sets how many ensemble runs execute concurrently
(kernels release the GIL when compiled).  Defaults to 1.
"""

import os


def _numba_wanted() -> bool:
    flag = os.environ.get("FILTERMIX_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


if _numba_wanted():
    try:
        from numba import njit as _njit
    except ImportError:
        _njit = None
else:
    _njit = None

HAS_NUMBA = _njit is not None


def jit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged."""
    if HAS_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func


def thread_count() -> int:
    """Worker threads for ensemble execution (FILTERMIX_THREADS, default 1)."""
    raw = os.environ.get("FILTERMIX_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"FILTERMIX_THREADS must be >= 1, got {raw}")
    return n
