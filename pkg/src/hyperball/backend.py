"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
versions take over. ``use("python")`` / ``use("compiled")`` switch at
runtime, mainly for tests and benchmarks.
"""

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = _compiled if _compiled is not None else _kernels_py


def available():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def name():
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use(which):
    global _active
    if which == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _compiled
    elif which == "python":
        _active = _kernels_py
    else:
        raise ValueError(f"unknown backend {which!r}")


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def scores(X, center, radius, scale):
    return _active.scores(_c(X), _c(center), _c(radius), _c(scale))


def cls_loss_grad(X, center, radius, scale, pos):
    pos = np.ascontiguousarray(pos, dtype=np.int64)
    return _active.cls_loss_grad(_c(X), _c(center), _c(radius), _c(scale), pos)
