"""Hot solver kernels: compiled extension with a pure-Python fallback.

Set ``HYPERBALANCE_PURE_PYTHON=1`` to force the fallback, e.g. for
benchmark comparisons (see ``benchmarks/bench_kernels.py``).
"""

import os

if os.environ.get("HYPERBALANCE_PURE_PYTHON"):
    from hyperbalance._kernels._py import balance_sweeps, epsilon_sweeps

    BACKEND = "python"
else:
    try:
        from hyperbalance._kernels._core import balance_sweeps, epsilon_sweeps

        BACKEND = "cython"
    except ImportError:
        from hyperbalance._kernels._py import balance_sweeps, epsilon_sweeps

        BACKEND = "python"

__all__ = ["balance_sweeps", "epsilon_sweeps", "BACKEND"]
