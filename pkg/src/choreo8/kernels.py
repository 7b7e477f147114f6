"""Backend selection for the hot three-body kernels.

The compiled extension is used when it imports; otherwise the numpy versions
are used. Set ``CHOREO8_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("CHOREO8_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from choreo8._kernels import accelerations, derivative, rk4_fixed

        BACKEND = "cython"
    except ImportError:  # extension not built
        pass

if BACKEND == "python":
    from choreo8._kernels_py import accelerations, derivative, rk4_fixed

__all__ = ["BACKEND", "accelerations", "derivative", "rk4_fixed"]
