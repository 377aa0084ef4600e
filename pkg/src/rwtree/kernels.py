"""Kernel backend selection: compiled extension if available, else pure Python.

Both backends implement the same functions with bit-identical output (the
parity test suite enforces this); ``BACKEND`` reports which one is active.
Set ``RWTREE_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("RWTREE_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND

walk_stats = _impl.walk_stats
hitting_time = _impl.hitting_time
first_return_time = _impl.first_return_time
passage_from_vertex = _impl.passage_from_vertex
cascade_stream = _impl.cascade_stream
