"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy reference
implementation.  Set VIBCAV_PURE=1 to force the pure backend (useful
for benchmarking and for debugging the compiled one).
"""
import os

if os.environ.get("VIBCAV_PURE", "") not in ("", "0"):
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _fastcore as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"

MAX_ITER = 10**6

phase_map = _impl.phase_map
moore_map = _impl.moore_map
bracket_vals = _impl.bracket_vals

__all__ = ["phase_map", "moore_map", "bracket_vals", "BACKEND", "MAX_ITER"]
