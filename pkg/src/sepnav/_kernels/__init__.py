"""Evaluation kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when it imported cleanly; set the
environment variable SEPNAV_BACKEND=python to force the pure-Python
reference implementation (useful for debugging and benchmarking).
"""

import os

from . import _reference

if os.environ.get("SEPNAV_BACKEND", "").lower() == "python":
    _impl = _reference
    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _reference
        BACKEND = "python"

hc_eval = _impl.hc_eval
hc_eval_u = _impl.hc_eval_u
lc_eval = _impl.lc_eval

reference_hc_eval = _reference.hc_eval
reference_hc_eval_u = _reference.hc_eval_u
reference_lc_eval = _reference.lc_eval

__all__ = [
    "BACKEND",
    "hc_eval",
    "hc_eval_u",
    "lc_eval",
    "reference_hc_eval",
    "reference_hc_eval_u",
    "reference_lc_eval",
]
