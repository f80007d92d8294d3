"""auvsim: deterministic 6-DOF torpedo-AUV simulator with a HIL/SIL bridge."""

from .core import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
