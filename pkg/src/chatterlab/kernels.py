"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``CHATTERLAB_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("CHATTERLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

arc_chain = _impl.arc_chain
landing = _impl.landing
candidate_objective = _impl.candidate_objective
coordinate_descent = _impl.coordinate_descent
propagate_uv = _impl.propagate_uv

__all__ = ["BACKEND", "arc_chain", "landing", "candidate_objective",
           "coordinate_descent", "propagate_uv"]
