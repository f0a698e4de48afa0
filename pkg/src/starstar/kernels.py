"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python kernel when
the extension is missing or STARSTAR_PURE=1 is set.  Both backends expose
`build_edges` and `aggregate_pairs` with identical contracts and produce
bit-identical results.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("STARSTAR_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
build_edges = _impl.build_edges
aggregate_pairs = _impl.aggregate_pairs


def available_backends() -> dict:
    """Importable kernel modules keyed by backend name."""
    backends = {_kernels_py.BACKEND: _kernels_py}
    try:
        from . import _kernels_cy

        backends[_kernels_cy.BACKEND] = _kernels_cy
    except ImportError:
        pass
    return backends
