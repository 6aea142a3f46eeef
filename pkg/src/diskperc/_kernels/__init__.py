"""Kernel backend selection.

The compiled Cython core is used when built; otherwise the NumPy fallback.
Set ``DISKPERC_PURE=1`` to force the fallback (used by the benchmark and by
tests that exercise both paths).
"""
import os

if os.environ.get("DISKPERC_PURE") == "1":
    from . import _fallback as _impl
else:
    try:
        from . import _core as _impl
    except ImportError:
        from . import _fallback as _impl

EXTENSION_ACTIVE = bool(_impl.EXTENSION)

stamp_disk = _impl.stamp_disk
apply_stencil = _impl.apply_stencil
ic0_pivots = _impl.ic0_pivots
ic0_solve = _impl.ic0_solve
sor_sweep = _impl.sor_sweep
dot = _impl.dot
march = _impl.march
mark_segments = _impl.mark_segments
flood_quasi = _impl.flood_quasi
