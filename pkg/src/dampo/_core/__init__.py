"""Numerical core: compiled extension when available, NumPy fallback otherwise.

Set DAMPO_FORCE_REFERENCE=1 to skip the compiled module (used by tests and
the benchmark to exercise both paths).
"""

from __future__ import annotations

import os

from . import reference

if os.environ.get("DAMPO_FORCE_REFERENCE"):
    _impl = reference
    BACKEND = "reference"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = reference
        BACKEND = "reference"

trig_sums = _impl.trig_sums
pv_sums = _impl.pv_sums


def backend_name() -> str:
    return BACKEND
