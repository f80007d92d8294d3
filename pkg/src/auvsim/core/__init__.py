"""Tick-kernel backend selection.

The compiled Cython kernel is preferred when it was built; the pure-Python
twin is the fallback.  Set AUVSIM_PURE_PYTHON=1 to force the fallback (used
by the backend-parity tests and the benchmark).
"""

import os

from .packing import MODE_ACTUATION, MODE_WRENCH, CoreModel, pack_state, unpack_state
from . import kernel_py

if os.environ.get("AUVSIM_PURE_PYTHON"):
    _kernel_mod = kernel_py
else:
    try:
        from . import _kernel as _kernel_mod
    except ImportError:
        _kernel_mod = kernel_py

BACKEND = _kernel_mod.BACKEND_NAME
rk4_tick = _kernel_mod.rk4_tick
derivative = _kernel_mod.derivative

__all__ = [
    "BACKEND",
    "CoreModel",
    "MODE_ACTUATION",
    "MODE_WRENCH",
    "derivative",
    "kernel_py",
    "pack_state",
    "rk4_tick",
    "unpack_state",
]
