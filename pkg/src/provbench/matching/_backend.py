"""Search kernel selection.

The compiled kernel (``_speedups``, built from Cython) is preferred
when importable; otherwise the pure Python twin is used.  Setting the
environment variable ``PROVBENCH_PURE`` to a non-empty value forces
the pure kernel, which is handy for benchmarking and debugging.
"""

import os

if os.environ.get("PROVBENCH_PURE"):
    from . import _pysearch as kernel

    KERNEL_NAME = "pure"
else:
    try:
        from . import _speedups as kernel  # type: ignore[no-redef]

        KERNEL_NAME = "compiled"
    except ImportError:
        from . import _pysearch as kernel  # type: ignore[no-redef]

        KERNEL_NAME = "pure"

__all__ = ["kernel", "KERNEL_NAME"]
