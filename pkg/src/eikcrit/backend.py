"""Kernel backend selection.

The hot numerical kernels (embedded Runge-Kutta integration of the
characteristic field) exist in two flavors: a numba-compiled one and a plain
Python/numpy one.  Selection happens once at import time through the
environment variable ``EIKCRIT_BACKEND``:

    EIKCRIT_BACKEND=numba   force numba (raises if numba is unavailable)
    EIKCRIT_BACKEND=numpy   force the pure-Python fallback
    unset                   numba when importable, else fallback
"""

import os

_requested = os.environ.get("EIKCRIT_BACKEND", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(f"EIKCRIT_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    USE_NUMBA = False
else:
    try:
        import numba  # noqa: F401
        USE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise
        USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


def maybe_jit(func):
    """@njit(cache=True) under the numba backend, identity otherwise."""
    if USE_NUMBA:
        from numba import njit
        return njit(cache=True)(func)
    return func
