"""Kernel backend selection.

The bootstrap inner loop exists twice: a Cython extension compiled at
install time and a pure-NumPy fallback with identical semantics. The
compiled core is preferred when it imports cleanly; set the environment
variable ``TSPLIT_BACKEND=python`` to force the fallback (or ``cython`` to
fail loudly when the extension is missing). ``benchmarks/bench_backends.py``
compares the two.
"""

import os

from . import py_kernels

_requested = os.environ.get("TSPLIT_BACKEND", "auto").strip().lower()

if _requested in ("", "auto"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = py_kernels
        BACKEND = "python"
elif _requested == "cython":
    from . import _kernels as _impl
    BACKEND = "cython"
elif _requested == "python":
    _impl = py_kernels
    BACKEND = "python"
else:
    raise ImportError(
        f"TSPLIT_BACKEND={_requested!r} not recognized (use 'auto', 'cython' or 'python')"
    )

bootstrap_replicates = _impl.bootstrap_replicates

__all__ = ["BACKEND", "bootstrap_replicates", "py_kernels"]
