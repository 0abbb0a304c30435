"""Integration kernel selection.

The compiled extension is preferred when importable; set
``NVGATESIM_BACKEND=python`` (or ``compiled``) to force a choice.
"""

from __future__ import annotations

import os

from . import _integrator as _python_kernel

try:
    from . import _kernel as _compiled_kernel
except ImportError:  # pure-Python install
    _compiled_kernel = None

_FORCED = os.environ.get("NVGATESIM_BACKEND", "").strip().lower()
if _FORCED == "python":
    _active = _python_kernel
elif _FORCED == "compiled":
    if _compiled_kernel is None:
        raise ImportError(
            "NVGATESIM_BACKEND=compiled but the extension is not built")
    _active = _compiled_kernel
else:
    _active = _compiled_kernel if _compiled_kernel is not None else _python_kernel


def backend_name() -> str:
    return "compiled" if _active is _compiled_kernel else "python"


def get_kernel(name=None):
    """Return the integrate() entry point of the requested backend."""
    if name in (None, ""):
        return _active.integrate
    if name == "python":
        return _python_kernel.integrate
    if name == "compiled":
        if _compiled_kernel is None:
            raise ValueError("compiled backend is not available")
        return _compiled_kernel.integrate
    raise ValueError(f"unknown backend {name!r}")


integrate = _active.integrate
StepSizeUnderflow = _python_kernel.StepSizeUnderflow
