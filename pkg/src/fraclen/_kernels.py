"""Backend selection for the hot classification kernels.

``FRACLEN_BACKEND=numpy`` forces the pure-numpy path; ``numba`` forces the
jitted path (and fails loudly if numba is unavailable).  Default is numba
when importable, numpy otherwise.
"""

import os

from . import _kernels_numpy

_cached = None


def backend_name():
    name = os.environ.get("FRACLEN_BACKEND", "").strip().lower()
    if name in ("numpy", "numba"):
        return name
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def get_backend():
    """Return the module implementing ``classify_discs``."""
    global _cached
    name = backend_name()
    if _cached is not None and _cached[0] == name:
        return _cached[1]
    if name == "numba":
        from . import _kernels_numba as mod
    else:
        mod = _kernels_numpy
    _cached = (name, mod)
    return mod
