"""Pure-NumPy implementations of the hot reduction kernels.

Same contracts as the compiled module `_speedups`; used as the import-time
fallback and as the baseline in `benchmarks/bench_kernels.py`.
"""

from __future__ import annotations

import numpy as np

# Cap on the size of the (times x nodes) scratch block, in elements.
_BLOCK = 4_000_000


def trig_sums(omega, weight, times):
    """Weighted trigonometric sums over quadrature nodes.

    Returns arrays (c, s, d) with, for each time t,

        c = sum_k w_k cos(omega_k t)
        s = sum_k w_k sin(omega_k t) / omega_k
        d = sum_k w_k sin(omega_k t) * omega_k

    All nodes must have omega_k > 0.
    """
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    weight = np.ascontiguousarray(weight, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    c = np.empty(times.size)
    s = np.empty(times.size)
    d = np.empty(times.size)
    w_inv = weight / omega
    w_mul = weight * omega
    chunk = max(1, _BLOCK // max(omega.size, 1))
    for i in range(0, times.size, chunk):
        phase = np.multiply.outer(times[i : i + chunk], omega)
        cos_block = np.cos(phase)
        np.sin(phase, out=phase)
        c[i : i + chunk] = cos_block @ weight
        s[i : i + chunk] = phase @ w_inv
        d[i : i + chunk] = phase @ w_mul
    return c, s, d


def pv_sums(targets, f_targets, nodes, weights, f_nodes):
    """Singularity-subtracted principal-value sums.

    For each target x_i returns sum_k w_k (f_k - f_i) / (x_i - x_k), the
    node part of a subtracted principal-value integral (the analytic log
    term is added by the caller).
    """
    targets = np.ascontiguousarray(targets, dtype=np.float64)
    f_targets = np.ascontiguousarray(f_targets, dtype=np.float64)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    f_nodes = np.ascontiguousarray(f_nodes, dtype=np.float64)
    out = np.empty(targets.size)
    chunk = max(1, _BLOCK // max(nodes.size, 1))
    for i in range(0, targets.size, chunk):
        dx = targets[i : i + chunk, None] - nodes[None, :]
        num = f_nodes[None, :] - f_targets[i : i + chunk, None]
        # An exact node hit contributes 0; the subtracted integrand is
        # finite there, so the omission is below quadrature error.
        np.copyto(dx, np.inf, where=dx == 0.0)
        out[i : i + chunk] = (num / dx) @ weights
    return out
