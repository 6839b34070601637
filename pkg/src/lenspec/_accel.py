"""Numba switch. Set LENSPEC_DISABLE_NUMBA=1 to force the pure-numpy kernels."""

import os

DISABLED = os.environ.get("LENSPEC_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if DISABLED:
        raise ImportError
    import numba

    njit = numba.njit
    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
