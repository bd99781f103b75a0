"""Backend selection for the hot loops.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy implementation in ``_pykernels`` is used.  Set
``POSIPLANT_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

_requested = os.environ.get("POSIPLANT_BACKEND", "auto").lower()

if _requested == "python":
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _pykernels

BACKEND: str = _impl.BACKEND

brute_force = _impl.brute_force
anneal = _impl.anneal
steepest_descent = _impl.steepest_descent
tarjan_scc = _impl.tarjan_scc
unique_backbone = _impl.unique_backbone
build_csr = _impl.build_csr


def available_backends() -> dict:
    """Map backend name to kernel module for every importable backend."""
    found = {"python": _pykernels}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        found["cython"] = _kernels
    return found
