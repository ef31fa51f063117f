"""Hot-loop kernels: compiled when the Cython extension is built, else pure Python.

Set ``ISOBISECT_PURE=1`` to force the pure-Python versions.
"""
from __future__ import annotations

import os

from . import _purepy

BACKEND = "python"

if os.environ.get("ISOBISECT_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _purepy
else:
    _impl = _purepy

label_components = _impl.label_components
decompose_search = _impl.decompose_search
path_discrepancy = _impl.path_discrepancy
repair_paths = _impl.repair_paths
bisection_candidates = _impl.bisection_candidates

__all__ = [
    "BACKEND",
    "bisection_candidates",
    "decompose_search",
    "label_components",
    "path_discrepancy",
    "repair_paths",
]
