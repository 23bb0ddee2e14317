"""Kernel dispatch: compiled extension when importable, else pure Python.

Set ``CLIQUEGOSSIP_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("CLIQUEGOSSIP_PURE_PYTHON"):
    from ._kernels_py import averaging_run, chromatic_number, independence_number
    BACKEND = "python"
else:
    try:
        from ._kernels import averaging_run, chromatic_number, independence_number
        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import averaging_run, chromatic_number, independence_number
        BACKEND = "python"

__all__ = ["BACKEND", "averaging_run", "chromatic_number", "independence_number"]
