"""Kernel lane selection.

Imports the compiled extension when available, otherwise the pure-Python
reference lane. ``TXT2VID_PURE_PYTHON=1`` forces the pure lane (used by the
cross-lane equivalence tests and the kernel benchmark).

Both lanes are required to be byte-identical; ``benchmarks/bench_kernels.py``
compares their throughput.
"""

from __future__ import annotations

import os

if os.environ.get("TXT2VID_PURE_PYTHON"):
    from txt2vid import _kernels_py as _impl
else:
    try:
        from txt2vid import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from txt2vid import _kernels_py as _impl

IMPLEMENTATION: str = _impl.IMPLEMENTATION
synth_gated_sine = _impl.synth_gated_sine
frame_gray_levels = _impl.frame_gray_levels
render_mouth_frames = _impl.render_mouth_frames
