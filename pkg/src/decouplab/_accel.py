"""Backend selection for the hot numeric kernels.

Kernels are written so they compile under numba's nopython mode; every one of
them also has a pure-numpy route.  Set ``DECOUPLAB_DISABLE_NUMBA=1`` to force
the numpy route (useful for debugging and for the parity benchmark).
"""

import os

_FLAG = os.environ.get("DECOUPLAB_DISABLE_NUMBA", "").strip().lower()

try:  # pragma: no cover - depends on the environment
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(fn):
    """Compile ``fn`` with numba when available, otherwise return it as-is.

    The returned object is always callable from Python; callers that need the
    uncompiled version regardless of the flag keep a reference to ``fn``.
    """
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
