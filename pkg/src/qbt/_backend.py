"""Pick the compiled kernels when available, the pure-Python ones otherwise.

Set ``QBT_PURE_PYTHON=1`` to force the fallback (used by the benchmark and by
the parity tests).
"""
import os

if os.environ.get("QBT_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
