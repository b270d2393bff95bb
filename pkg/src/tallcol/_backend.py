"""Numba switch.

Set ``TALLCOL_DISABLE_NUMBA=1`` to run every kernel through the pure
numpy path. When numba is missing the numpy path is used as well.
"""
import os

_DISABLED = os.environ.get("TALLCOL_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

JIT_OPTIONS = {"cache": True, "nogil": True}


def njit(func):
    if HAVE_NUMBA:
        return numba.njit(**JIT_OPTIONS)(func)
    return func
