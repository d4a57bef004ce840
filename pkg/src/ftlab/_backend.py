"""Kernel backend selection.

Imports the compiled extension when present and falls back to the
pure-Python kernels otherwise.  Set ``FTLAB_FORCE_PY=1`` to skip the
extension, which the parity tests and the benchmark use to time both
implementations in one process.
"""

from __future__ import annotations

import os

from ftlab import _kernels_py

if os.environ.get("FTLAB_FORCE_PY") == "1":
    _impl = _kernels_py
else:
    try:
        from ftlab import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND_NAME: str = _impl.BACKEND_NAME

ge2_grid = _impl.ge2_grid
propagate_frames = _impl.propagate_frames

OP_NOP = _impl.OP_NOP
OP_H = _impl.OP_H
OP_PHASE = _impl.OP_PHASE
OP_CNOT = _impl.OP_CNOT
OP_SWAP = _impl.OP_SWAP
OP_MEASZ = _impl.OP_MEASZ
OP_PREP = _impl.OP_PREP
OP_CCX = _impl.OP_CCX
OP_CCZ = _impl.OP_CCZ
