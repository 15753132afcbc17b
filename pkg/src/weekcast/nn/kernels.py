"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Set WEEKCAST_KERNELS=python or WEEKCAST_KERNELS=cython to force a backend;
forcing cython raises if the extension was not built.
"""

from __future__ import annotations

import os

from . import kernels_py

_forced = os.environ.get("WEEKCAST_KERNELS", "").strip().lower()

if _forced == "python":
    _impl = kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise ImportError(
                "WEEKCAST_KERNELS=cython but the compiled extension is missing; "
                "reinstall the package to build it"
            ) from None
        _impl = kernels_py
        BACKEND = "python"

conv1d_forward = _impl.conv1d_forward
conv1d_backward = _impl.conv1d_backward
maxpool1d_forward = _impl.maxpool1d_forward
maxpool1d_backward = _impl.maxpool1d_backward
