"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``MCBOP_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("MCBOP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

matmul = _impl.matmul
gauss_jordan = _impl.gauss_jordan
