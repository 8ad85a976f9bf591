"""Package-wide tolerances and thread-count resolution."""

from __future__ import annotations

import os

# Relative tolerance for adaptive quadrature of smooth weighted averages.
REL_TOL = 1e-9
# Absolute floor handed to the quadrature engine.
ABS_TOL = 1e-12
# Physics checks pass at this absolute tolerance, looser than the
# quadrature tolerance so that model violations are not masked by (or
# mistaken for) integration error.
PHYS_TOL = 1e-6

THREADS_ENV = "DAMPO_THREADS"


def worker_count() -> int:
    """Thread budget for parallel kernel evaluation (capped by DAMPO_THREADS)."""
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            n = 1
        return max(1, n)
    return max(1, min(4, os.cpu_count() or 1))
