"""Kernel backend selection.

The compiled Cython kernels are used when the extension built; setting
GDPPCA_PURE_PYTHON=1 in the environment forces the numpy fallback.  Both
backends implement the same functions with the same semantics, differing
only in speed and in floating-point summation order (agreement is at
rounding level per step, not bit level).
"""

import os

if os.environ.get("GDPPCA_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]


def backend_name() -> str:
    """Which kernel implementation is active: "compiled" or "numpy"."""
    return kernels.BACKEND
