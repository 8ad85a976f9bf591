# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled reductions for the oscillatory and principal-value hot loops.

Mirrors `dampo._core.reference`; loops release the GIL so callers can
shard work across threads.
"""

import numpy as np

from libc.math cimport cos, sin


def trig_sums(omega_in, weight_in, times_in):
    """Weighted trig sums (c, s, d) over positive quadrature nodes."""
    cdef double[::1] omega = np.ascontiguousarray(omega_in, dtype=np.float64)
    cdef double[::1] weight = np.ascontiguousarray(weight_in, dtype=np.float64)
    cdef double[::1] times = np.ascontiguousarray(times_in, dtype=np.float64)
    cdef Py_ssize_t n = omega.shape[0]
    cdef Py_ssize_t m = times.shape[0]
    c_arr = np.empty(m)
    s_arr = np.empty(m)
    d_arr = np.empty(m)
    cdef double[::1] c = c_arr
    cdef double[::1] s = s_arr
    cdef double[::1] d = d_arr
    cdef Py_ssize_t i, k
    cdef double t, acc_c, acc_s, acc_d, ph, co, si, w, om
    with nogil:
        for i in range(m):
            t = times[i]
            acc_c = 0.0
            acc_s = 0.0
            acc_d = 0.0
            for k in range(n):
                om = omega[k]
                w = weight[k]
                ph = om * t
                co = cos(ph)
                si = sin(ph)
                acc_c += w * co
                acc_s += w * si / om
                acc_d += w * si * om
            c[i] = acc_c
            s[i] = acc_s
            d[i] = acc_d
    return c_arr, s_arr, d_arr


def pv_sums(targets_in, f_targets_in, nodes_in, weights_in, f_nodes_in):
    """Node part of singularity-subtracted principal-value integrals."""
    cdef double[::1] targets = np.ascontiguousarray(targets_in, dtype=np.float64)
    cdef double[::1] f_targets = np.ascontiguousarray(f_targets_in, dtype=np.float64)
    cdef double[::1] nodes = np.ascontiguousarray(nodes_in, dtype=np.float64)
    cdef double[::1] weights = np.ascontiguousarray(weights_in, dtype=np.float64)
    cdef double[::1] f_nodes = np.ascontiguousarray(f_nodes_in, dtype=np.float64)
    cdef Py_ssize_t m = targets.shape[0]
    cdef Py_ssize_t n = nodes.shape[0]
    out_arr = np.empty(m)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double x, fx, acc, dx
    with nogil:
        for i in range(m):
            x = targets[i]
            fx = f_targets[i]
            acc = 0.0
            for k in range(n):
                dx = x - nodes[k]
                if dx != 0.0:
                    acc += weights[k] * (f_nodes[k] - fx) / dx
            out[i] = acc
    return out_arr
