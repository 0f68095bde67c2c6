"""Kernel backend selection.

The compiled extension is used when importable; set DYNQ_PURE_PYTHON=1 to
force the numpy fallback.
"""

import os

from . import _pykernels

INF = _pykernels.INF

if os.environ.get("DYNQ_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _pykernels
        BACKEND = "python"

minplus_relax = _impl.minplus_relax
drop_through = _impl.drop_through
gauss_jordan_mod = _impl.gauss_jordan_mod
reduce_mod = _impl.reduce_mod


def backends():
    """Available backends as a name -> module map."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:  # pragma: no cover
        pass
    return out
