"""Kernel selection: the compiled extension when it imports, else pure Python.

Set ``DEMANDLOG_KERNEL=python`` to force the fallback.
"""
import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

KERNELS = {"python": _pykernel}
if _ckernel is not None:
    KERNELS["compiled"] = _ckernel

if os.environ.get("DEMANDLOG_KERNEL", "").lower() == "python" or _ckernel is None:
    default = _pykernel
else:
    default = _ckernel


def get(name=None):
    """Kernel module by name ("python", "compiled", "auto"/None)."""
    if name in (None, "auto"):
        return default
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} is not available; have {sorted(KERNELS)}") from None
