"""Runtime backend selection for the hot kernels.

Two implementations of every hot kernel ship with the package: a numba-jitted
fast path and a numpy/python fallback.  The environment variable
``LANDSKEW_BACKEND`` picks one explicitly (``numba`` or ``numpy``); by default
the jitted path is used whenever numba imports cleanly.

``LANDSKEW_THREADS`` caps the size of the worker pool used for embarrassingly
parallel maps (per-sample alignment inside the iterative mean).
"""
from __future__ import annotations

import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on numba-less installs
    HAVE_NUMBA = False

__all__ = ["HAVE_NUMBA", "backend_name", "use_numba", "thread_count"]


def backend_name() -> str:
    """Resolve the active kernel backend ("numba" or "numpy")."""
    env = os.environ.get("LANDSKEW_BACKEND", "").strip().lower()
    if env in ("numpy", "python"):
        return "numpy"
    if env == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError(
                "LANDSKEW_BACKEND=numba requested but numba is not importable"
            )
        return "numba"
    if env not in ("", "auto"):
        raise RuntimeError(f"unknown LANDSKEW_BACKEND value: {env!r}")
    return "numba" if HAVE_NUMBA else "numpy"


def use_numba() -> bool:
    return backend_name() == "numba"


def thread_count() -> int:
    """Worker cap for parallel maps (defaults to the machine's core count)."""
    env = os.environ.get("LANDSKEW_THREADS", "").strip()
    if env:
        n = int(env)
        if n < 1:
            raise RuntimeError("LANDSKEW_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1
