"""Selects the compiled kernels when importable, else the pure-Python fallback.

Set ``PNFGAME_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("PNFGAME_PURE_PYTHON"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
