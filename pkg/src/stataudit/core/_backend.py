"""Kernel backend selection.

The compiled Cython kernels are preferred when importable; the pure-Python
twins are the fallback. STATAUDIT_PURE=1 forces the fallback (used by the
benchmark and by the backend-agreement tests).
"""

import os

if os.environ.get("STATAUDIT_PURE") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels_c as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels


def backend_name():
    """'compiled' when the C extension is active, else 'pure'."""
    return "compiled" if kernels.__name__.endswith("_kernels_c") else "pure"
