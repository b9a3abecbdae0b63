"""Optional numba acceleration.

Set ``GROUPACCESS_DISABLE_NUMBA=1`` before import to force the pure numpy
code paths.  Kernels decorated with :func:`njit` run as plain Python when
numba is missing or disabled, so callers should check :data:`USE_NUMBA`
and pick a vectorized fallback for hot loops.
"""
import os

_FLAG = os.environ.get("GROUPACCESS_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if DISABLED:
        raise ImportError("numba disabled by environment")
    import numba as _numba
    HAVE_NUMBA = True
except ImportError:
    _numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if USE_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
