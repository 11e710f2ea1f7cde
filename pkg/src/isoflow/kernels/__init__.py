"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set ISOFLOW_FORCE_PYKERNELS=1 to force the pure-Python backend (used by the
benchmark and the backend-parity tests).
"""
import os

from . import _pykernels

if os.environ.get("ISOFLOW_FORCE_PYKERNELS") == "1":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
trace_batch = _impl.trace_batch
ray_surface_counts = _impl.ray_surface_counts

__all__ = ["BACKEND", "trace_batch", "ray_surface_counts"]
