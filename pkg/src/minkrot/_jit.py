"""Backend switch for the compiled kernels.

``MINKROT_BACKEND=numpy`` forces the pure-numpy path; the default is numba
when it imports cleanly.
"""

import os

_requested = os.environ.get("MINKROT_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"MINKROT_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba as _numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _numba = None
    HAVE_NUMBA = False

JIT_ENABLED = HAVE_NUMBA and _requested == "numba"
BACKEND = "numba" if JIT_ENABLED else "numpy"


def njit(func=None, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise.

    Unlike ``JIT_ENABLED`` this ignores the env flag, so both compiled and
    interpreted variants can coexist in one process (tests, benchmark).
    """
    if not HAVE_NUMBA:
        if func is not None:
            return func
        return lambda f: f
    opts = {"cache": True}
    opts.update(kwargs)
    if func is not None:
        return _numba.njit(**opts)(func)
    return _numba.njit(**opts)
