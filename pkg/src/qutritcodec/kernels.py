"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``QUTRITCODEC_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("QUTRITCODEC_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("compiled kernels disabled by environment")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def available_backends():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def decoder_stats(ks, q, backend=None):
    backend = backend or BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        ks = np.ascontiguousarray(ks, dtype=complex)
        q = np.ascontiguousarray(q, dtype=complex)
        return _compiled.decoder_stats(ks, q)
    if backend == "python":
        return _kernels_py.decoder_stats(ks, q)
    raise ValueError(f"unknown backend {backend!r}")
