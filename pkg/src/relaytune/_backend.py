"""Kernel backend selection, resolved once at import.

The compiled core (relaytune._loops_c) is preferred; the pure-Python twin
takes over when the extension was not built. RELAYTUNE_BACKEND=python or
=compiled forces the choice; forcing the compiled core raises when absent.
"""

import os

from . import _loops_py

_requested = os.environ.get("RELAYTUNE_BACKEND", "").strip().lower()

if _requested in ("", "compiled", "c"):
    try:
        from . import _loops_c as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested:
            raise ImportError(
                "RELAYTUNE_BACKEND=compiled but the relaytune._loops_c "
                "extension is not built"
            )
        _impl = _loops_py
        BACKEND = "python"
elif _requested in ("python", "py", "pure"):
    _impl = _loops_py
    BACKEND = "python"
else:
    raise ImportError(
        f"unknown RELAYTUNE_BACKEND={_requested!r}; use 'compiled' or 'python'"
    )

lag_loop = _impl.lag_loop
relay_loop = _impl.relay_loop
pid_loop = _impl.pid_loop


def available_backends():
    """Kernel backends importable in this environment, preferred first."""
    names = ["python"]
    try:
        from . import _loops_c  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names
