"""Kernel backend selection.

The compiled extension ``tulczyjew._kernels`` is used when it imports; the
numpy module ``tulczyjew._kernels_py`` is the fallback.  Setting the
environment variable ``TULCZYJEW_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

KERNEL_NAMES = (
    "bracket",
    "ad_star",
    "ad_matrix",
    "expm",
    "rk4_lie_poisson_quadratic",
    "rk4_euler_poincare_quadratic",
)


def _load():
    if os.environ.get("TULCZYJEW_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _kernels
    except ImportError:
        return _kernels_py, "python"
    return _kernels, "compiled"


kernels, BACKEND = _load()


def get_kernels(name):
    """Return the kernel module for ``"compiled"`` or ``"python"``."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
