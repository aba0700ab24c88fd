"""Hot loops, dispatched to the compiled extension when it is importable.

Set ``OUTERLIP_PURE_PYTHON=1`` to force the pure-Python implementations.
"""
from __future__ import annotations

import os

from . import _pykernels

_impl = _pykernels
if not os.environ.get("OUTERLIP_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

BACKEND: str = _impl.BACKEND
ratio_max = _impl.ratio_max
class_minima = _impl.class_minima
loop_signatures = _impl.loop_signatures
oracle_scan = _impl.oracle_scan
