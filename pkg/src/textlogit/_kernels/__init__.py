"""Backend selection for the coordinate-descent hot loop.

The compiled Cython kernel is used when its extension module importable;
otherwise the numpy fallback takes over. Setting TEXTLOGIT_PURE=1 forces
the fallback (useful for debugging and for the backend benchmark).
"""

import os

from . import _pure

BACKEND = "pure"
cd_sweep = _pure.cd_sweep
scad_update = _pure.scad_update

if os.environ.get("TEXTLOGIT_PURE") != "1":
    try:
        from . import _cdkernel

        cd_sweep = _cdkernel.cd_sweep
        scad_update = _cdkernel.scad_update
        BACKEND = "cython"
    except ImportError:
        pass


def available_backends():
    """Name -> module for every importable backend (for benchmarks/tests)."""
    backends = {"pure": _pure}
    try:
        from . import _cdkernel as compiled

        backends["cython"] = compiled
    except ImportError:
        pass
    return backends
