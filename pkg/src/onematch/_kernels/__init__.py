"""Residual-kernel backend selection.

The compiled extension is preferred when importable; the pure-numpy twin is
the fallback. ``ONEMATCH_KERNELS=python`` (or ``compiled``) forces a backend.
Both produce bit-identical results, so the choice never changes estimation
output, only speed.
"""

import os

from . import _pykernels

_forced = os.environ.get("ONEMATCH_KERNELS", "").strip().lower()

if _forced == "python":
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "ONEMATCH_KERNELS=compiled but the native extension is not built"
            )
        _impl = _pykernels

sampson = _impl.sampson
symmetric_epipolar = _impl.symmetric_epipolar
homography_transfer = _impl.homography_transfer


def backend_name():
    """'compiled' when the native extension is active, else 'python'."""
    return _impl.BACKEND


def available_backends():
    """Mapping of backend name -> module, for tests and benchmarks."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["compiled"] = _ckernels
    except ImportError:
        pass
    return out
