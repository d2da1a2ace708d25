"""Selects the compiled kernel core, falling back to pure NumPy.

The Cython extension (``gsparse._kernels``) and the NumPy module
(``gsparse._kernels_py``) expose identical functions; whichever is active is
re-exported here.  Set ``GSPARSE_PURE_PYTHON=1`` before import to force the
fallback (used by the parity tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

HAVE_EXTENSION = _compiled is not None

if HAVE_EXTENSION and not os.environ.get("GSPARSE_PURE_PYTHON"):
    _active = _compiled
else:
    _active = _kernels_py

USING_EXTENSION = _active is not _kernels_py

component_values = _active.component_values
scan_affine_min = _active.scan_affine_min
scan_nsp_max = _active.scan_nsp_max
scan_sigma_budget = _active.scan_sigma_budget


def backend_name() -> str:
    return "compiled" if USING_EXTENSION else "numpy"
