"""Backend selection for the geometric kernels.

The compiled extension is used when it imports cleanly, unless the
environment variable ``FENCHEL_GAME_PURE_PYTHON`` is set to a non-empty value
other than ``0``. ``BACKEND`` names the active implementation.
"""

import os
from types import ModuleType

from . import _kernels_py

__all__ = [
    "BACKEND",
    "available_backends",
    "get_backend",
    "box_lmo",
    "lp_lmo",
    "simplex_project",
    "lp_ball_project",
    "soft_threshold",
    "average_update",
]

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def available_backends():
    """Names of the kernel backends importable in this environment."""
    return ["python"] + (["cython"] if _ckernels is not None else [])


def get_backend(name: str) -> ModuleType:
    """Return the kernel module for ``name`` ("python" or "cython")."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not built")
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    flag = os.environ.get("FENCHEL_GAME_PURE_PYTHON", "")
    if flag not in ("", "0") or _ckernels is None:
        return "python"
    return "cython"


BACKEND = _select()
_impl = get_backend(BACKEND)

box_lmo = _impl.box_lmo
lp_lmo = _impl.lp_lmo
simplex_project = _impl.simplex_project
lp_ball_project = _impl.lp_ball_project
soft_threshold = _impl.soft_threshold
average_update = _impl.average_update
