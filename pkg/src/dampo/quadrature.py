"""Shared quadrature machinery.

Three ingredients used throughout the package:

* adaptive quadrature on [0, inf) through the rational map
  omega = scale * u / (1 - u), for smooth weighted averages;
* fixed-order Gauss-Legendre panels, for tabulated integrands and for the
  oscillatory kernels (panel widths are chosen by the callers so that no
  panel spans more than a fraction of an oscillation period);
* closed-form tails  int_W^inf  x^(-p) {cos,sin}(x t) dx  built from the
  sine/cosine integrals, so algebraic tails never have to be truncated.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.special import sici

from .errors import QuadratureNonConvergence

_LEGENDRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def semi_infinite_average(fn, scale, rel_tol=1e-9, abs_tol=1e-12, limit=400,
                          points=None):
    """Integrate fn over [0, inf) after mapping to the unit interval.

    fn must accept a float frequency and return a float.  `points` are
    optional break points already expressed in the mapped variable.
    Raises QuadratureNonConvergence (with the achieved residual attached)
    if the adaptive engine cannot meet the tolerance.
    """
    s = float(scale)

    def mapped(u):
        w = s * u / (1.0 - u)
        return fn(w) * s / (1.0 - u) ** 2

    value, residual = quad(mapped, 0.0, 1.0, epsabs=abs_tol, epsrel=rel_tol,
                           limit=limit, points=points)
    bound = max(abs_tol, rel_tol * abs(value)) * 50.0
    if not np.isfinite(value) or residual > max(bound, 1e-8):
        raise QuadratureNonConvergence(
            f"semi-infinite quadrature stalled (residual {residual:.3e})",
            residual=residual,
        )
    return value


def finite_average(fn, a, b, rel_tol=1e-9, abs_tol=1e-12, limit=400, points=None):
    """Adaptive quadrature on a finite interval, with optional break points."""
    value, residual = quad(
        fn, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit, points=points
    )
    bound = max(abs_tol, rel_tol * abs(value)) * 50.0
    if not np.isfinite(value) or residual > max(bound, 1e-8):
        raise QuadratureNonConvergence(
            f"finite quadrature stalled (residual {residual:.3e})", residual=residual
        )
    return value


def _leggauss(order: int):
    if order not in _LEGENDRE_CACHE:
        _LEGENDRE_CACHE[order] = leggauss(order)
    return _LEGENDRE_CACHE[order]


def panel_nodes(edges, order=8):
    """Gauss-Legendre nodes and weights on the panels defined by `edges`.

    Returns flat (nodes, weights) arrays covering [edges[0], edges[-1]].
    """
    edges = np.asarray(edges, dtype=np.float64)
    x, w = _leggauss(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def split_edges(edges, max_width):
    """Subdivide intervals so that no panel exceeds max_width."""
    edges = np.asarray(edges, dtype=np.float64)
    out = [edges[:1]]
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, int(np.ceil((b - a) / max_width)))
        out.append(np.linspace(a, b, n + 1)[1:])
    return np.concatenate(out)


def graded_edges(lo, hi, scale_fn, cap, growth=1.25, max_panels=400_000):
    """March panel edges from lo to hi.

    The local width is min(cap, scale_fn(x) / 6), never growing by more
    than `growth` per step, so sharp features near lo are resolved without
    wasting panels in featureless regions.
    """
    edges = [lo]
    x = lo
    h_prev = None
    while x < hi:
        h = min(cap, max(scale_fn(x) / 6.0, (hi - lo) * 1e-12))
        if h_prev is not None:
            h = min(h, h_prev * growth)
        h_prev = h
        x = min(x + h, hi)
        edges.append(x)
        if len(edges) > max_panels:
            raise QuadratureNonConvergence(
                f"panel budget exceeded ({max_panels}) while grading [{lo}, {hi}]"
            )
    return np.array(edges)


def tail_trig_integrals(W, t, p_max, phase_switch=8.0, laguerre_order=80):
    """Tail integrals C_p(t) = int_W^inf cos(x t) x^(-p) dx and the sine
    counterparts S_p, for p = 1 .. p_max.

    Two regimes, both accurate to near machine precision in absolute terms:

    * small phase W t: upward recursion from Si/Ci (the step factor
      t/(p-1) stays bounded by the phase cap over W, so rounding never
      amplifies materially);
    * large phase: rotate the contour to omega = W + i y / t, turning the
      oscillatory integral into an exponentially weighted smooth one that a
      fixed Gauss-Laguerre rule nails (the recursion would cancel
      catastrophically here).

    Returns (C, S) arrays of shape (p_max + 1, len(t)); row p holds order p
    (row 0 is unused).  t must be non-negative; at t = 0 the integrals are
    the elementary power laws (order 1 diverges).
    """
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    C = np.zeros((p_max + 1, t.size))
    S = np.zeros((p_max + 1, t.size))
    x_all = W * t
    zero = t == 0.0
    small = (~zero) & (x_all < phase_switch)
    large = x_all >= phase_switch

    for p in range(2, p_max + 1):
        C[p, zero] = W ** (1 - p) / (p - 1)
    C[1, zero] = np.inf

    if np.any(small):
        x = x_all[small]
        si, ci = sici(x)
        C[1, small] = -ci
        S[1, small] = 0.5 * np.pi - si
        cos_x = np.cos(x)
        sin_x = np.sin(x)
        ts = t[small]
        for p in range(2, p_max + 1):
            wpow = W ** (1 - p) / (p - 1)
            C[p, small] = cos_x * wpow - ts / (p - 1) * S[p - 1, small]
            S[p, small] = sin_x * wpow + ts / (p - 1) * C[p - 1, small]

    if np.any(large):
        y, v = _laguerre(laguerre_order)
        tl = t[large]
        base = W + 1j * y[None, :] / tl[:, None]
        phase = (1j / tl) * np.exp(1j * W * tl)
        for p in range(1, p_max + 1):
            vals = phase * ((base ** (-p)) @ v)
            C[p, large] = vals.real
            S[p, large] = vals.imag
    return C, S


_LAGUERRE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _laguerre(order: int):
    if order not in _LAGUERRE_CACHE:
        _LAGUERRE_CACHE[order] = np.polynomial.laguerre.laggauss(order)
    return _LAGUERRE_CACHE[order]


def pv_log_term(x, a, b):
    """Analytic part of the subtracted principal value on [a, b]:
    PV int_a^b dx' / (x - x') = log((x - a) / (b - x)) for a < x < b."""
    x = np.asarray(x, dtype=np.float64)
    return np.log((x - a) / (b - x))
