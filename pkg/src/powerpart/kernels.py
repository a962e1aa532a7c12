"""Kernel selection.

The compiled extension is used when it imports; otherwise the numpy/pure
Python fallback. Set ``POWERPART_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py as python_kernels

compiled_kernels = None
if os.environ.get("POWERPART_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as compiled_kernels  # type: ignore[no-redef]
    except ImportError:
        compiled_kernels = None

active = compiled_kernels if compiled_kernels is not None else python_kernels

IMPLEMENTATION: str = active.IMPLEMENTATION
mod_stride = active.mod_stride
exact_stride = active.exact_stride
mod_convolve = active.mod_convolve
