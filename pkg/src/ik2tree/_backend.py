"""Kernel selection.

The compiled extension ``ik2tree._kernels`` is used when importable; the
pure-Python ``_pykernels`` otherwise, or always when the environment variable
``IK2TREE_PURE_PYTHON`` is set to a non-empty value other than ``0``.
Callers must look up ``_backend.kernels`` at call time so that ``use()``
can swap implementations (tests and the backend benchmark rely on this).
"""

from __future__ import annotations

import os
from contextlib import contextmanager

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

COMPILED_AVAILABLE = _compiled is not None

if os.environ.get("IK2TREE_PURE_PYTHON", "") not in ("", "0") or _compiled is None:
    kernels = _pykernels
else:
    kernels = _compiled


def available() -> list[str]:
    return ["compiled", "python"] if COMPILED_AVAILABLE else ["python"]


def get(name: str):
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def current() -> str:
    return "compiled" if kernels is _compiled and _compiled is not None else "python"


@contextmanager
def use(name: str):
    """Temporarily route every query through the named backend."""
    global kernels
    saved = kernels
    kernels = get(name)
    try:
        yield kernels
    finally:
        kernels = saved
