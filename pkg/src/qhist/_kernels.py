"""Selects the compiled kernels when available, else the numpy fallback.

Set ``QHIST_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("QHIST_PURE_PYTHON"):
    from . import _chain_py as impl
    BACKEND = "python"
else:
    try:
        from . import _chain as impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _chain_py as impl
        BACKEND = "python"

expand = impl.expand
max_offdiag = impl.max_offdiag

__all__ = ["BACKEND", "expand", "max_offdiag"]
