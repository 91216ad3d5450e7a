"""Numeric kernel backend selection.

The compiled Cython kernels are preferred when the extension was built;
otherwise the pure NumPy fallback is used. Both produce bitwise-identical
results. Set the environment variable ``SPHEREBOUND_PURE_PYTHON=1`` before
import to force the fallback (useful for benchmarking and debugging).
"""

import os

from . import _pykern

if os.environ.get("SPHEREBOUND_PURE_PYTHON"):
    _impl = _pykern
    HAVE_EXT = False
else:
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]

        HAVE_EXT = True
    except ImportError:
        _impl = _pykern
        HAVE_EXT = False

BACKEND = "cython" if HAVE_EXT else "numpy"

gegenbauer_table = _impl.gegenbauer_table
eval_series = _impl.eval_series
classify_tetra_points = _impl.classify_tetra_points

__all__ = [
    "BACKEND",
    "HAVE_EXT",
    "gegenbauer_table",
    "eval_series",
    "classify_tetra_points",
]
