"""Kernel backend selection.

The compiled Cython core is used when present; set AMPLIKIT_PURE_PYTHON=1
to force the numpy fallback. Both backends implement the same contract and
produce identical outputs (see tests/test_kernels.py).
"""

import os

if os.environ.get("AMPLIKIT_PURE_PYTHON"):
    from . import pure as _impl
else:
    try:
        from . import core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as _impl

BACKEND = _impl.BACKEND
solve_batch = _impl.solve_batch

__all__ = ["BACKEND", "solve_batch"]
