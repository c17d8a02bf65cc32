"""Backend selection for the batch kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py`` is used.  Setting ``QF_PURE_PYTHON=1``
forces the numpy path.
"""
import os

from . import _kernels_py

if os.environ.get("QF_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

aux_batch = _impl.aux_batch
metric_batch = _impl.metric_batch


def max_workers() -> int:
    """Worker cap for parallel scans: ``QF_THREADS`` or the CPU count."""
    env = os.environ.get("QF_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
