"""Optional numba acceleration.

Kernels are compiled with numba when it is importable. Setting the
environment variable ``CHANQUERY_NO_NUMBA=1`` selects the pure-numpy
fallbacks instead, which is handy for debugging and for the benchmark.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("CHANQUERY_NO_NUMBA", "").strip().lower() not in {
    "1",
    "true",
    "yes",
    "on",
}


def njit(func):
    """Compile ``func`` with numba if available, otherwise return it unchanged."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)
