"""Numerical kernels, compiled when available.

``BACKEND`` is ``"cython"`` if the extension modules imported, else
``"python"``. Set ``FRACTOBACK_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback as python_kernels

compiled_kernels = None
if os.environ.get("FRACTOBACK_PURE_PYTHON", "") != "1":
    try:
        from . import _l1, _series
    except ImportError:
        pass
    else:
        class compiled_kernels:  # noqa: N801 - namespace mirroring the fallback module
            series_sum = staticmethod(_series.series_sum)
            series_many = staticmethod(_series.series_many)
            l1_history = staticmethod(_l1.l1_history)

if compiled_kernels is not None:
    BACKEND = "cython"
    series_sum = compiled_kernels.series_sum
    series_many = compiled_kernels.series_many
    l1_history = compiled_kernels.l1_history
else:
    BACKEND = "python"
    series_sum = python_kernels.series_sum
    series_many = python_kernels.series_many
    l1_history = python_kernels.l1_history

__all__ = ["BACKEND", "series_sum", "series_many", "l1_history",
           "python_kernels", "compiled_kernels"]
