"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``PLAYHYST_PURE=1`` to force the Python path (used by the benchmark and
the parity tests).
"""
import os

BACKEND = "python"

if os.environ.get("PLAYHYST_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import (play_response, play_scan, play_solve,  # noqa: F401
                               play_solve_cells, truncate_sum)
        BACKEND = "compiled"
    except ImportError:
        pass

if BACKEND == "python":
    from ._fallback import (play_response, play_scan, play_solve,  # noqa: F401
                            play_solve_cells, truncate_sum)
