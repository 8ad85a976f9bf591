"""Ohmic reservoir model and memory-kernel bookkeeping.

The friction kernel is the cosine transform of the bath spectral function
J(omega) divided by omega.  For the exponential-cutoff Ohmic form
J = m * gamma * omega * exp(-omega/omega_c) the kernel is an explicit
Lorentzian in time, which is why a finite cutoff is mandatory: the
kernel's t = 0 value, kappa0 = 2 gamma omega_c / pi, is exactly the gap
between the squared short-time and long-time frequencies, and the
positivity of the Hamiltonian demands Omega0^2 > kappa0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline, PchipInterpolator

from . import _core, config, quadrature
from .errors import DivergentKernel, NonDecayedKernel

__all__ = [
    "OhmicBath",
    "MemoryKernel",
    "FrequencyReport",
    "ohmic_kernel",
    "kernel_from_density",
    "frequency_constraints",
    "markov_damping",
    "write_kernel_csv",
    "read_spectral_function_csv",
]


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic reservoir with an exponential frequency cutoff."""

    gamma: float
    omega_c: float
    m: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0 or self.omega_c <= 0 or self.m <= 0:
            raise ValueError("gamma, omega_c and m must be positive")

    def spectral_function(self, omega):
        """J(omega) = m gamma omega exp(-omega/omega_c)."""
        omega = np.asarray(omega, dtype=np.float64)
        return self.m * self.gamma * omega * np.exp(-omega / self.omega_c)

    @property
    def kappa0(self) -> float:
        return 2.0 * self.gamma * self.omega_c / np.pi


@dataclass
class MemoryKernel:
    times: np.ndarray
    kappa: np.ndarray

    @property
    def kappa0(self) -> float:
        return float(self.kappa[0])


def ohmic_kernel(b: OhmicBath, times) -> MemoryKernel:
    """Closed-form Ohmic kernel (2/pi) gamma omega_c / (1 + omega_c^2 t^2)."""
    times = np.ascontiguousarray(times, dtype=np.float64)
    kappa = (2.0 / np.pi) * b.gamma * b.omega_c / (1.0 + (b.omega_c * times) ** 2)
    return MemoryKernel(times=times, kappa=kappa)


def kernel_from_density(omega_grid, j_values, m: float, times,
                        order: int = 10, interpolation: str = "pchip") -> MemoryKernel:
    """Memory kernel from a tabulated spectral function:
    kappa(t) = (2 / pi m) * int J(w)/w cos(w t) dw.

    The table is interpolated with a monotone cubic by default (pass
    interpolation="spline" for dense machine-generated tables); the
    integral uses Gauss panels narrow enough for the largest requested
    time.  Raises DivergentKernel when J/w is not integrable at zero
    (J(0) != 0).
    """
    grid = np.asarray(omega_grid, dtype=np.float64)
    j = np.asarray(j_values, dtype=np.float64)
    times = np.ascontiguousarray(times, dtype=np.float64)
    if grid[0] == 0.0 and abs(j[0]) > 0.0:
        raise DivergentKernel("J(0) != 0 makes J/omega non-integrable at zero")
    if np.allclose(j, 0.0):
        return MemoryKernel(times=times, kappa=np.zeros_like(times))
    if interpolation == "spline":
        interp = CubicSpline(grid, j, extrapolate=False)
    else:
        interp = PchipInterpolator(grid, j, extrapolate=False)
    t_max = float(times.max()) if times.size else 0.0
    cap = (grid[-1] - grid[0]) / 64.0
    if t_max > 0:
        cap = min(cap, np.pi / (4.0 * t_max))
    edges = quadrature.split_edges(grid, cap)
    nodes, wts = quadrature.panel_nodes(edges, order=order)
    g = np.nan_to_num(interp(nodes), nan=0.0) / nodes
    weights = wts * g * (2.0 / (np.pi * m))
    c, _, _ = _core.trig_sums(nodes, weights, times)
    return MemoryKernel(times=times, kappa=c)


@dataclass(frozen=True)
class FrequencyReport:
    kappa0: float
    omega0_sq: float
    Omega0_sq: float
    omega0_positive: bool
    bound_satisfied: bool
    consistent: bool

    def to_dict(self) -> dict:
        return {
            "kappa0": self.kappa0,
            "omega0_sq": self.omega0_sq,
            "Omega0_sq": self.Omega0_sq,
            "omega0_positive": self.omega0_positive,
            "bound_satisfied": self.bound_satisfied,
            "consistent": self.consistent,
        }


def frequency_constraints(b: OhmicBath, Omega0: float | None = None,
                          omega0: float | None = None,
                          tol: float = config.PHYS_TOL) -> FrequencyReport:
    """Check the two-frequency bookkeeping for an Ohmic bath.

    Given either natural frequency the other follows from
    Omega0^2 = omega0^2 + kappa0; supplying both also verifies their
    consistency.  The short-time frequency must clear the positivity
    bound Omega0^2 > kappa0.
    """
    k0 = b.kappa0
    if Omega0 is None and omega0 is None:
        raise ValueError("supply Omega0, omega0, or both")
    if Omega0 is None:
        Omega0_sq = omega0**2 + k0
        omega0_sq = omega0**2
        consistent = True
    elif omega0 is None:
        Omega0_sq = Omega0**2
        omega0_sq = Omega0**2 - k0
        consistent = True
    else:
        Omega0_sq = Omega0**2
        omega0_sq = omega0**2
        consistent = abs(Omega0_sq - (omega0_sq + k0)) <= tol * max(1.0, Omega0_sq)
    return FrequencyReport(
        kappa0=k0,
        omega0_sq=omega0_sq,
        Omega0_sq=Omega0_sq,
        omega0_positive=omega0_sq > 0,
        # strict bound up to rounding: omega0 = 0+ is allowed, so equality
        # at float precision must not fail
        bound_satisfied=bool(Omega0_sq - k0 > -tol * max(1.0, Omega0_sq)),
        consistent=bool(consistent),
    )


def markov_damping(k: MemoryKernel, decay_fraction: float = 0.05) -> float:
    """Markovian friction rate: the time integral of the kernel over the
    stored window plus an algebraic-tail estimate.

    The kernel must have decayed below `decay_fraction` of its t = 0 value
    by the end of the window; the tail is extrapolated as A/t^2 with A
    fitted to the last decade of samples.
    """
    t = k.times
    kap = k.kappa
    k0 = abs(kap[0])
    if k0 == 0.0:
        return 0.0
    if abs(kap[-1]) > decay_fraction * k0:
        raise NonDecayedKernel(
            f"kernel still at {abs(kap[-1]) / k0:.2%} of kappa(0) at the window end"
        )
    head = simpson(kap, x=t)
    last = t >= 0.9 * t[-1]
    amp = float(np.median(kap[last] * t[last] ** 2))
    tail = amp / t[-1]
    return float(head + tail)


def write_kernel_csv(k: MemoryKernel, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "kappa"])
        for ti, ki in zip(k.times, k.kappa):
            writer.writerow([format(ti, ".17g"), format(ki, ".17g")])


def read_spectral_function_csv(path):
    """Read a `omega,J` table."""
    grid = []
    vals = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["omega", "J"]:
            raise ValueError(f"expected header 'omega,J', got {header!r}")
        for row in reader:
            if not row:
                continue
            grid.append(float(row[0]))
            vals.append(float(row[1]))
    return np.array(grid), np.array(vals)
