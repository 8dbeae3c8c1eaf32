"""Selects the q-permanent kernel backend at import time.

The compiled Cython module is preferred; set ``QUON_PURE_PYTHON=1`` to force
the pure-Python fallback.  Both backends are importable side by side through
:func:`get_backend` so they can be cross-checked and benchmarked.
"""
import importlib
import os
from types import ModuleType

_NAMES = {"compiled": "quon._kernels", "python": "quon._pykernels"}


def get_backend(name: str) -> ModuleType:
    """Return the kernel module ``"compiled"`` or ``"python"``."""
    try:
        return importlib.import_module(_NAMES[name])
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}") from None


def available_backends() -> list[str]:
    found = []
    for name in _NAMES:
        try:
            get_backend(name)
        except ImportError:
            continue
        found.append(name)
    return found


if os.environ.get("QUON_PURE_PYTHON"):
    BACKEND = "python"
else:
    BACKEND = "compiled" if "compiled" in available_backends() else "python"

impl = get_backend(BACKEND)

qperm_coeffs = impl.qperm_coeffs
qperm_value = impl.qperm_value
fill_gram_coeffs = impl.fill_gram_coeffs
fill_gram_float = impl.fill_gram_float
