"""Mean-value dynamics of the damped oscillator.

The mean position and momentum evolve through three weighted averages of
elementary oscillations,

    c(t) = << cos(w t) >>,   s(t) = << sin(w t)/w >>,   d(t) = << w sin(w t) >>,

so that  x(t) = c x0 + s p0/m  and  p(t) = c p0 - m d x0.  Dissipation is
pure dephasing between the frequency components; c also decides the
damping character (oscillatory motion means c has a stationary point at
t > 0).
"""

from __future__ import annotations

import csv
import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _core, config, quadrature, states
from .errors import (
    DegenerateRates,
    InconclusiveHorizon,
    InsufficientSamples,
    QuadratureNonConvergence,
)
from .spectral import ParametricDensity, SpectralDensity

__all__ = [
    "EvolutionSeries",
    "DampingClass",
    "kernels",
    "closed_form_kernels",
    "evolve_means",
    "classify_damping",
    "classical_damping_label",
    "short_time_frequency",
    "steady_state",
    "classical_reference",
    "default_horizon",
    "write_series_csv",
]


@dataclass
class EvolutionSeries:
    """Propagation kernels (and optionally mean trajectories) on a time grid."""

    times: np.ndarray
    c: np.ndarray
    s: np.ndarray
    d: np.ndarray
    mean_x: np.ndarray | None = None
    mean_p: np.ndarray | None = None
    converged: np.ndarray | None = None
    meta: dict = field(default_factory=dict)


class DampingClass(enum.Enum):
    UNDERDAMPED = "underdamped"
    OVER_OR_CRITICAL = "over_or_critical"


def _trig_sums_threaded(nodes, weights, times, workers):
    if workers <= 1 or times.size < 256:
        return _core.trig_sums(nodes, weights, times)
    splits = np.array_split(np.arange(times.size), workers)
    c = np.empty(times.size)
    s = np.empty(times.size)
    d = np.empty(times.size)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            (idx, pool.submit(_core.trig_sums, nodes, weights, times[idx]))
            for idx in splits
            if idx.size
        ]
        for idx, fut in futures:
            ci, si, di = fut.result()
            c[idx], s[idx], d[idx] = ci, si, di
    return c, s, d


def _tail_contributions(sd: SpectralDensity, times: np.ndarray):
    """Closed-form tail of each kernel integral beyond the head cut."""
    series = sd.tail_series()
    c = np.zeros(times.size)
    s = np.zeros(times.size)
    d = np.zeros(times.size)
    if not series:
        return c, s, d
    W = sd.head_cut()
    p_max = max(p for _, p in series) + 1
    cos_t, sin_t = quadrature.tail_trig_integrals(W, times, p_max)
    for coef, p in series:
        c += coef * cos_t[p]
        s += coef * sin_t[p + 1]
        d += coef * sin_t[p - 1]
    return c, s, d


def kernels(sd: SpectralDensity, times, abs_tol: float = 1e-7, order: int = 10,
            workers: int | None = None, raise_on_failure: bool = False) -> EvolutionSeries:
    """Evaluate the three propagation kernels by oscillatory-aware quadrature.

    The frequency axis is cut into panels no wider than 1/8 of an
    oscillation at the largest requested time (and no wider than the local
    feature scale of the weight); each panel gets a fixed-order
    Gauss-Legendre rule, and the algebraic tail of the weight is added in
    closed form.  A lower-order companion pass provides a per-time error
    estimate, reported in `converged`.

    Parameters
    ----------
    sd:
        Spectral weight of any kind.
    times:
        Non-negative time grid.
    abs_tol:
        Absolute accuracy target per time point.
    order, workers:
        Gauss order per panel and thread count (defaults to DAMPO_THREADS).
    raise_on_failure:
        Raise QuadratureNonConvergence instead of just flagging points.
    """
    times = np.ascontiguousarray(times, dtype=np.float64)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    if workers is None:
        workers = config.worker_count()
    t_max = float(times.max()) if times.size else 0.0
    edges = sd.head_edges(t_max)

    def pruned(order_):
        # nodes where the weight cannot move any kernel by > abs_tol/1e3
        # are dropped; wide almost-empty bands would otherwise dominate cost
        nodes_, wts_ = quadrature.panel_nodes(edges, order=order_)
        weights_ = wts_ * sd.value(nodes_)
        bound = np.abs(weights_) * (nodes_ + 1.0 / nodes_)
        keep = bound > (abs_tol * 1e-3) / max(bound.size, 1)
        return nodes_[keep], weights_[keep]

    nodes, weights = pruned(order)
    c, s, d = _trig_sums_threaded(nodes, weights, times, workers)

    # companion pass at lower order for the error estimate
    nodes_lo, weights_lo = pruned(max(3, order - 4))
    c2, s2, d2 = _trig_sums_threaded(nodes_lo, weights_lo, times, workers)
    err = np.maximum(np.abs(c - c2), np.maximum(np.abs(s - s2), np.abs(d - d2)))
    converged = err <= abs_tol
    if raise_on_failure and not converged.all():
        worst = float(err.max())
        raise QuadratureNonConvergence(
            f"kernel quadrature missed {abs_tol:g} at "
            f"{np.count_nonzero(~converged)} time points",
            residual=worst,
        )

    tc, ts, td = _tail_contributions(sd, times)
    return EvolutionSeries(
        times=times, c=c + tc, s=s + ts, d=d + td, converged=converged,
        meta={"method": "quadrature", "abs_tol": abs_tol, "nodes": int(nodes.size)},
    )


def _closed_form_amplitudes(sd: ParametricDensity):
    a, b, c = sd.rates
    scale = max(abs(a), abs(b), abs(c))
    for x, y in ((a, b), (b, c), (c, a)):
        if abs(x - y) <= 1e-12 * scale:
            raise DegenerateRates(f"rates {x} and {y} coincide; closed form is singular")
    amp = {
        a: a * (b + c) / ((a - b) * (c - a)),
        b: b * (a + c) / ((a - b) * (b - c)),
        c: c * (a + b) / ((c - a) * (b - c)),
    }
    return amp


def closed_form_kernels(sd: ParametricDensity, times) -> EvolutionSeries:
    """Triple-exponential closed forms of the kernels for the parametric
    weight: c is a sum of three decaying exponentials, d = -dc/dt
    analytically, and s integrates c term by term."""
    if not isinstance(sd, ParametricDensity):
        raise TypeError("closed-form kernels exist for the parametric weight only")
    times = np.ascontiguousarray(times, dtype=np.float64)
    amp = _closed_form_amplitudes(sd)
    c = np.zeros(times.size, dtype=np.complex128)
    s = np.zeros_like(c)
    d = np.zeros_like(c)
    for rate, a_k in amp.items():
        decay = np.exp(-rate * times)
        c += a_k * decay
        d += rate * a_k * decay
        s += a_k * (1.0 - decay) / rate
    worst = max(np.abs(c.imag).max(), np.abs(s.imag).max(), np.abs(d.imag).max(), 0.0)
    if worst > 1e-10:
        raise DegenerateRates(f"closed form produced imaginary residue {worst:.3e}")
    return EvolutionSeries(
        times=times, c=c.real, s=s.real, d=d.real,
        converged=np.ones(times.size, dtype=bool),
        meta={"method": "closed-form"},
    )


def evolve_means(series: EvolutionSeries, x0: float, p0: float, m: float) -> EvolutionSeries:
    """Fill in the mean trajectories for initial means (x0, p0)."""
    mean_x = series.c * x0 + series.s * p0 / m
    mean_p = series.c * p0 - m * series.d * x0
    return replace(series, mean_x=mean_x, mean_p=mean_p)


def default_horizon(sd: ParametricDensity) -> float:
    """Default classification horizon: ten lifetimes of the slowest decay."""
    return 10.0 / min(r.real for r in sd.rates)


def classify_damping(series: EvolutionSeries, c_floor: float = 1e-3) -> DampingClass:
    """Strict oscillation criterion on a sampled kernel series.

    Underdamped iff d(t) (= minus the slope of c) crosses zero at some
    t > 0 inside the sampled window.  If no crossing is found and c has
    not decayed below `c_floor`, the window proved nothing and
    InconclusiveHorizon is raised.
    """
    t = series.times
    d = series.d
    interior = t > 0
    if np.count_nonzero(interior) < 4:
        raise InconclusiveHorizon("need a denser time grid to classify")
    dv = d[interior]
    signs = np.sign(dv)
    crossing = np.any(signs[:-1] * signs[1:] < 0) or np.any(dv[1:] == 0.0)
    if crossing:
        return DampingClass.UNDERDAMPED
    if abs(series.c[-1]) < c_floor:
        return DampingClass.OVER_OR_CRITICAL
    raise InconclusiveHorizon(
        f"no stationary point found but |c| = {abs(series.c[-1]):.3g} has not "
        f"decayed below {c_floor:g}; extend the horizon"
    )


def classical_damping_label(sd: ParametricDensity) -> DampingClass:
    """Label from the classical discriminant of the rate pair: a complex
    pair oscillates, a real pair does not."""
    if sd.gamma_plus.imag != 0.0:
        return DampingClass.UNDERDAMPED
    return DampingClass.OVER_OR_CRITICAL


def short_time_frequency(series: EvolutionSeries) -> float:
    """Short-time curvature estimate of the squared frequency.

    Fits y(t) = -2 (c(t) - 1)/t^2 linearly in t over samples with
    t <= 0.01 / sqrt(rough estimate) and returns the extrapolated t -> 0
    intercept, which converges to the second moment of the weight.
    """
    t = series.times
    c = series.c
    mask = t > 0
    if np.count_nonzero(mask) == 0:
        raise InsufficientSamples("no positive-time samples")
    y_all = -2.0 * (c[mask] - 1.0) / t[mask] ** 2
    rough = y_all[0]
    if rough <= 0:
        raise InsufficientSamples("first sample gives a non-positive curvature")
    window = 0.01 / np.sqrt(rough)
    keep = t[mask] <= window
    if np.count_nonzero(keep) < 5:
        raise InsufficientSamples(
            f"need at least 5 samples at t <= {window:.3g}, got {int(np.count_nonzero(keep))}"
        )
    coeffs = np.polynomial.polynomial.polyfit(t[mask][keep], y_all[keep], deg=1)
    return float(coeffs[0])


def steady_state(sd: SpectralDensity, m: float, beta: float) -> states.GaussianState:
    """Late-time state of the dynamics: the mean-force Gibbs state (equal
    to the thermally weighted reduced state; verified against the discrete
    oracle in the test suite)."""
    return states.thermal_state(sd, m, beta)


def classical_reference(sd: ParametricDensity, times) -> np.ndarray:
    """Classical damped-oscillator displacement kernel with the same rate
    pair (the slow-rate -> 0 limit of the closed-form c)."""
    times = np.ascontiguousarray(times, dtype=np.float64)
    gp, gm = sd.gamma_plus, sd.gamma_minus
    if abs(gp - gm) <= 1e-12 * max(abs(gp), abs(gm)):
        raise DegenerateRates("critically damped classical reference not implemented")
    out = (gp * np.exp(-gm * times) - gm * np.exp(-gp * times)) / (gp - gm)
    return out.real


def write_series_csv(series: EvolutionSeries, path, header_comment: str | None = None):
    """CSV dump `t,c,s,d,mean_x,mean_p` (means blank when absent)."""
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "c", "s", "d", "mean_x", "mean_p"])
        n = series.times.size
        mx = series.mean_x if series.mean_x is not None else [None] * n
        mp = series.mean_p if series.mean_p is not None else [None] * n
        for i in range(n):
            row = [
                format(series.times[i], ".17g"),
                format(series.c[i], ".17g"),
                format(series.s[i], ".17g"),
                format(series.d[i], ".17g"),
                "" if mx[i] is None else format(mx[i], ".17g"),
                "" if mp[i] is None else format(mp[i], ".17g"),
            ]
            writer.writerow(row)
