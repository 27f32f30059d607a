"""Backend selection for the hot kernels.

Every kernel in the package exists twice: a numba ``@njit`` version and a
pure-numpy version.  The numba path is used when numba imports cleanly and
the environment variable ``LSLAB_NO_NUMBA`` is unset (or ``0``).  Tests and
the benchmark flip the backend at runtime with :func:`use_numba`.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("LSLAB_NO_NUMBA", "0").strip().lower()
_enabled = HAVE_NUMBA and _flag in ("", "0", "false", "no")


def numba_enabled():
    return _enabled


def use_numba(flag):
    """Switch backend; returns the previous setting."""
    global _enabled
    prev = _enabled
    _enabled = bool(flag) and HAVE_NUMBA
    return prev


def njit(*args, **kwargs):
    """``numba.njit`` with caching, or the identity decorator without numba."""
    kwargs.setdefault("cache", True)
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def dispatch(nb_impl, np_impl):
    """Return a callable that routes to ``nb_impl`` or ``np_impl``."""

    def call(*args):
        if _enabled:
            return nb_impl(*args)
        return np_impl(*args)

    call.numba_impl = nb_impl
    call.numpy_impl = np_impl
    call.__name__ = getattr(np_impl, "__name__", "kernel").lstrip("_").replace("_np", "")
    call.__doc__ = np_impl.__doc__
    return call
