"""Numba switch.

Set ``SPARSEAR_DISABLE_NUMBA=1`` before import to run every kernel on the
pure-numpy path. If numba is not importable the numpy path is used silently.
"""

import os

_disabled = os.environ.get("SPARSEAR_DISABLE_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on"}

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, otherwise return the function as-is."""
    if HAVE_NUMBA:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def identity(func):
        return func
    return identity
