"""Hot-kernel backend selection.

The compiled extension (`_ck`, Cython) and the NumPy fallback (`_npy`)
implement the same three kernels with bit-identical arithmetic. The compiled
one is picked when the build produced it; set SIGFX_BACKEND=pure to force the
fallback or SIGFX_BACKEND=compiled to insist on the extension.
"""

from __future__ import annotations

import os

from . import _npy


def _select():
    choice = os.environ.get("SIGFX_BACKEND", "").strip().lower()
    if choice in ("pure", "numpy"):
        return _npy
    if choice in ("compiled", "ext"):
        from . import _ck  # raises ImportError if the build skipped it
        return _ck
    if choice:
        raise ValueError(
            "SIGFX_BACKEND must be 'pure' or 'compiled', got %r" % choice)
    try:
        from . import _ck
        return _ck
    except ImportError:
        return _npy


_impl = _select()

smo_classifier = _impl.smo_classifier
smo_regressor = _impl.smo_regressor
best_split = _impl.best_split


def backend_name():
    """Name of the active kernel backend, 'compiled' or 'numpy'."""
    return _impl.BACKEND_NAME
