"""Hot numeric kernels with a compiled core and a pure-NumPy fallback.

The compiled extension (``_core``, Cython) is preferred when importable;
otherwise the NumPy reference implementations in ``_fallback`` are used.
Set ``CELLBENCH_NO_EXT=1`` to force the fallback, e.g. for benchmarking.
"""

import os

from . import _fallback

_force_fallback = os.environ.get("CELLBENCH_NO_EXT", "") not in ("", "0")

try:
    if _force_fallback:
        raise ImportError("fallback forced by CELLBENCH_NO_EXT")
    from . import _core as _impl

    HAVE_COMPILED = True
except ImportError:
    _impl = _fallback
    HAVE_COMPILED = False

label_overlap = _impl.label_overlap
connected_components_4 = _impl.connected_components_4
heat_diffusion = _impl.heat_diffusion
flow_advect = _impl.flow_advect
priority_flood = _impl.priority_flood

__all__ = [
    "HAVE_COMPILED",
    "label_overlap",
    "connected_components_4",
    "heat_diffusion",
    "flow_advect",
    "priority_flood",
]
