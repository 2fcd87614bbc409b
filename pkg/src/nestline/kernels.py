"""Select the compiled kernels when available, else the numpy fallback.

Set ``NESTLINE_PURE_PYTHON=1`` to force the fallback.
"""

import contextlib
import os

from . import _kernels_py

_NAMES = ("bl_search", "constraints", "jt_vec", "al_value_grad")

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKEND = "python"
_impl = _kernels_py
if _compiled is not None and os.environ.get("NESTLINE_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
    _impl = _compiled
    BACKEND = "compiled"

bl_search = _impl.bl_search
constraints = _impl.constraints
jt_vec = _impl.jt_vec
al_value_grad = _impl.al_value_grad


def available() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily route every kernel call to ``name`` ("compiled" or "python")."""
    global BACKEND
    if name not in available():
        raise ValueError(f"kernel backend {name!r} is not available")
    mod = _compiled if name == "compiled" else _kernels_py
    g = globals()
    saved = {k: g[k] for k in _NAMES}, BACKEND
    try:
        for k in _NAMES:
            g[k] = getattr(mod, k)
        BACKEND = name
        yield
    finally:
        g.update(saved[0])
        BACKEND = saved[1]
