"""Pick the compiled kernels when importable, else the numpy ones.

Set ``IOMHASH_PURE_PYTHON=1`` to force the numpy kernels.
"""
import os

from . import _kernels_py

if os.environ.get("IOMHASH_PURE_PYTHON", "").strip() not in ("", "0"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels_c as kernels
    except ImportError:
        kernels = _kernels_py

BACKEND = "cython" if kernels is not _kernels_py else "python"


def compiled_kernels():
    """The compiled module, or None when the extension was not built."""
    try:
        from . import _kernels_c
    except ImportError:
        return None
    return _kernels_c
