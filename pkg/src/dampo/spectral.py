"""Spectral weight pi(omega): construction, averages, and physics checks.

The spectral weight is the normalised frequency distribution that fixes
every static and dynamic property of the damped oscillator treated here.
Three flavours are supported:

* ``ParametricDensity`` -- the rational triple-pole family controlled by a
  slow rate Gamma and a pair of rates gamma_plus/gamma_minus (either both
  real positive or complex conjugates);
* ``TabulatedDensity`` -- values on a frequency grid with an algebraic
  tail model, monotone-cubic interpolation in between;
* the same tabulated container tagged kind="fano-derived" when produced
  by the diagonalisation machinery in :mod:`dampo.fano`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from . import config, quadrature
from .errors import DegenerateRates, NegativeFrequency, NonPhysicalPoles

__all__ = [
    "SpectralDensity",
    "ParametricDensity",
    "TabulatedDensity",
    "OscillatorParams",
    "MomentSet",
    "ValidationReport",
    "make_parametric_density",
    "density_value",
    "weighted_average",
    "closed_form_moments",
    "validate",
    "read_density_csv",
    "write_density_csv",
]


@dataclass(frozen=True)
class OscillatorParams:
    """Mass plus the two natural frequencies (short-time and long-time)."""

    m: float
    Omega0: float
    omega0: float

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if not (self.Omega0 >= self.omega0 > 0):
            raise ValueError("frequencies must satisfy Omega0 >= omega0 > 0")


@dataclass(frozen=True)
class MomentSet:
    mean_omega: float
    mean_inv_omega: float
    omega0_sq: float


@dataclass(frozen=True)
class ValidationReport:
    """Physics checks for a spectral weight; `passed` maps check -> bool."""

    normalization_residual: float
    pi_at_zero: float
    second_moment: float
    mean_omega: float
    mean_inv_omega: float
    cauchy_schwartz_product: float
    min_value_on_grid: float
    passed: dict[str, bool]

    def all_passed(self) -> bool:
        return all(self.passed.values())

    def to_dict(self) -> dict:
        return {
            "normalization_residual": self.normalization_residual,
            "pi_at_zero": self.pi_at_zero,
            "second_moment": self.second_moment,
            "mean_omega": self.mean_omega,
            "mean_inv_omega": self.mean_inv_omega,
            "cauchy_schwartz_product": self.cauchy_schwartz_product,
            "min_value_on_grid": self.min_value_on_grid,
            "passed": dict(self.passed),
        }


class SpectralDensity:
    """Common interface of the density flavours."""

    kind: str = "abstract"

    def value(self, omega):
        raise NotImplementedError

    def average(self, f, rel_tol=config.REL_TOL):
        raise NotImplementedError

    # -- hints consumed by the oscillatory-kernel quadrature ---------------

    def head_cut(self) -> float:
        """End of the numerically integrated region; an algebraic tail
        model takes over beyond it."""
        raise NotImplementedError

    def tail_series(self):
        """List of (coefficient, power) with pi(w) ~ sum c_j w^-p_j past
        the head cut."""
        raise NotImplementedError

    def head_edges(self, t_max: float) -> np.ndarray:
        """Panel edges on [0, head_cut] resolving both the density features
        and an oscillation of duration 2*pi/t_max."""
        raise NotImplementedError

    # -- conveniences -------------------------------------------------------

    @cached_property
    def omega0_sq(self) -> float:
        """Second moment of the weight (the short-time frequency squared)."""
        return self.average(lambda w: w * w)

    def moments(self) -> MomentSet:
        return MomentSet(
            mean_omega=self.average(lambda w: w),
            mean_inv_omega=self.average(lambda w: 1.0 / w if w > 0 else 0.0),
            omega0_sq=self.omega0_sq,
        )


def _osc_cap(t_max: float, fallback: float) -> float:
    # limit panels to <= 1/8 of an oscillation at the largest time
    if t_max <= 0:
        return fallback
    return min(fallback, np.pi / (4.0 * t_max))


class ParametricDensity(SpectralDensity):
    """Rational spectral weight with poles at +/- i Gamma, +/- i gamma_+,
    +/- i gamma_-.

    The numerator constant is fixed by normalisation; see
    :func:`make_parametric_density` for the validated constructor.
    """

    kind = "parametric"

    def __init__(self, Gamma: float, gamma_plus: complex, gamma_minus: complex):
        self.Gamma = float(Gamma)
        self.gamma_plus = complex(gamma_plus)
        self.gamma_minus = complex(gamma_minus)
        k = (
            (self.gamma_plus + self.gamma_minus)
            * (self.gamma_minus + self.Gamma)
            * (self.Gamma + self.gamma_plus)
        )
        self._k = float(k.real)

    @property
    def rates(self) -> tuple[complex, complex, complex]:
        return (complex(self.Gamma), self.gamma_plus, self.gamma_minus)

    def value(self, omega):
        omega = np.asarray(omega, dtype=np.float64)
        if np.any(omega < 0):
            raise NegativeFrequency("spectral weight is defined for omega >= 0")
        w2 = omega * omega
        denom = np.ones_like(omega, dtype=np.complex128)
        for r in self.rates:
            denom = denom * (w2 + r * r)
        out = (2.0 / np.pi) * w2 * self._k / denom
        return out.real if out.ndim else float(out.real)

    def average(self, f, rel_tol=config.REL_TOL, limit=400):
        scale = max(self.Gamma, abs(self.gamma_plus), 1.0)
        # hint the adaptive engine at the weight's features so that widely
        # separated rate scales are never stepped over
        marks = []
        for centre, width in self._features():
            marks.extend((centre - 3 * width, centre - width, centre,
                          centre + width, centre + 3 * width))
        breaks = sorted({w / (scale + w) for w in marks if w > 0})
        return quadrature.semi_infinite_average(
            lambda w: f(w) * self.value(w), scale, rel_tol=rel_tol,
            abs_tol=config.ABS_TOL, limit=limit, points=breaks,
        )

    @cached_property
    def omega0_sq(self) -> float:
        g, p, m = self.rates
        return float((g * (p + m) + p * m).real)

    @property
    def classical_omega0_sq(self) -> float:
        """Long-time frequency squared, gamma_+ * gamma_-."""
        return float((self.gamma_plus * self.gamma_minus).real)

    @property
    def classical_damping(self) -> float:
        """Classical friction rate, gamma_+ + gamma_-."""
        return float((self.gamma_plus + self.gamma_minus).real)

    # -- kernel-quadrature hints -------------------------------------------

    def _features(self):
        # each pole pair shows up on the real axis near |Im rate| with a
        # half-width of Re rate
        return [(abs(r.imag), max(r.real, 1e-300)) for r in self.rates]

    def head_cut(self) -> float:
        return 12.0 * max(abs(r) for r in self.rates)

    def tail_series(self):
        g2 = [r * r for r in self.rates]
        p2 = sum(g2)
        p4 = g2[0] * g2[1] + g2[1] * g2[2] + g2[2] * g2[0]
        p6 = g2[0] * g2[1] * g2[2]
        coeffs = [1.0 + 0j, -p2, p2 * p2 - p4, -(p2**3 - 2 * p2 * p4 + p6)]
        front = 2.0 * self._k / np.pi
        return [(front * float(c.real), 4 + 2 * j) for j, c in enumerate(coeffs)]

    def head_edges(self, t_max: float) -> np.ndarray:
        features = self._features()

        def scale(w):
            return min(max(width, abs(w - centre)) for centre, width in features)

        hi = self.head_cut()
        cap = _osc_cap(t_max, hi / 64.0)
        return quadrature.graded_edges(0.0, hi, scale, cap)


class TabulatedDensity(SpectralDensity):
    """Spectral weight sampled on an ascending grid.

    Between grid points the weight is interpolated with a monotone cubic;
    below the first point it ramps quadratically to zero (the weight must
    vanish at zero frequency); past the last point an algebraic tail
    C / omega^p applies, with C pinned to the last sample by default.
    """

    kind = "tabulated"

    def __init__(self, omega_grid, values, tail_exponent: float = 4.0,
                 tail_coef: float | None = None, kind: str | None = None,
                 interpolation: str = "pchip"):
        grid = np.asarray(omega_grid, dtype=np.float64)
        vals = np.asarray(values, dtype=np.float64)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("need an ascending grid of at least two frequencies")
        if np.any(np.diff(grid) <= 0) or grid[0] < 0:
            raise ValueError("grid must be strictly ascending and non-negative")
        if vals.shape != grid.shape:
            raise ValueError("values must match the grid")
        if np.any(vals < 0):
            raise ValueError("spectral weight values must be non-negative")
        self.omega_grid = grid
        self.values = vals
        self.tail_exponent = float(tail_exponent)
        if self.tail_exponent <= 3.0:
            raise ValueError("tail exponent must exceed 3 for a finite second moment")
        if tail_coef is None:
            tail_coef = float(vals[-1]) * float(grid[-1]) ** self.tail_exponent
        self.tail_coef = float(tail_coef)
        if kind is not None:
            self.kind = kind
        # monotone cubic for user tables (no spurious oscillation); plain
        # cubic spline for machine-generated dense tables, where pchip's
        # derivative clamping at extrema costs two orders of accuracy
        if interpolation == "pchip":
            self._interp = PchipInterpolator(grid, vals, extrapolate=False)
        elif interpolation == "spline":
            self._interp = CubicSpline(grid, vals, extrapolate=False)
        else:
            raise ValueError(f"unknown interpolation {interpolation!r}")
        self.interpolation = interpolation

    def value(self, omega):
        omega = np.asarray(omega, dtype=np.float64)
        if np.any(omega < 0):
            raise NegativeFrequency("spectral weight is defined for omega >= 0")
        scalar = omega.ndim == 0
        omega = np.atleast_1d(omega)
        out = np.zeros_like(omega)
        lo, hi = self.omega_grid[0], self.omega_grid[-1]
        inside = (omega >= lo) & (omega <= hi)
        out[inside] = np.clip(self._interp(omega[inside]), 0.0, None)
        below = omega < lo
        if lo > 0 and np.any(below):
            out[below] = self.values[0] * (omega[below] / lo) ** 2
        above = omega > hi
        if np.any(above):
            out[above] = self.tail_coef * omega[above] ** (-self.tail_exponent)
        return float(out[0]) if scalar else out

    def average(self, f, rel_tol=config.REL_TOL, order=10):
        fv = np.vectorize(f, otypes=[np.float64])
        edges = self.omega_grid
        if edges[0] > 0:
            edges = np.concatenate(([0.0], edges))
        nodes, weights = quadrature.panel_nodes(edges, order=order)
        head = float(np.dot(weights, fv(nodes) * self.value(nodes)))
        if self.tail_coef == 0.0:
            return head
        # tail via omega = W / v, v in (0, 1]
        W = self.omega_grid[-1]
        p = self.tail_exponent

        def tail_integrand(v):
            w = W / v
            return f(w) * self.tail_coef * w ** (-p) * W / (v * v)

        tail = quadrature.finite_average(
            tail_integrand, 0.0, 1.0, rel_tol=rel_tol, abs_tol=config.ABS_TOL
        )
        return head + tail

    def head_cut(self) -> float:
        return float(self.omega_grid[-1])

    def tail_series(self):
        if self.tail_coef == 0.0:
            return []
        if abs(self.tail_exponent - round(self.tail_exponent)) > 1e-12:
            raise ValueError("oscillatory tails need an integer tail exponent")
        return [(self.tail_coef, int(round(self.tail_exponent)))]

    def head_edges(self, t_max: float) -> np.ndarray:
        edges = self.omega_grid
        if edges[0] > 0:
            edges = np.concatenate(([0.0], edges))
        span = edges[-1] - edges[0]
        return quadrature.split_edges(edges, _osc_cap(t_max, span / 64.0))

    @classmethod
    def from_parametric(cls, density: ParametricDensity, n_points: int = 2048):
        """Sample a parametric weight onto a log-ish grid (testing aid)."""
        hi = density.head_cut()
        lo = hi * 1e-6
        grid = np.geomspace(lo, hi, n_points)
        tail = density.tail_series()[0]
        return cls(grid, density.value(grid), tail_exponent=tail[1], tail_coef=tail[0])


def make_parametric_density(Gamma, gamma_plus, gamma_minus,
                            check_normalization: bool = True) -> ParametricDensity:
    """Validated constructor for the rational spectral weight.

    The rate triple must have Gamma real positive and gamma_plus/minus
    either both real positive or a complex-conjugate pair with positive
    real part; anything else gives a weight that is negative or complex
    somewhere and is rejected.
    """
    g = complex(Gamma)
    gp = complex(gamma_plus)
    gm = complex(gamma_minus)
    if abs(g.imag) > 1e-14 * abs(g) or g.real <= 0:
        raise NonPhysicalPoles("Gamma must be a positive real rate")
    real_pair = gp.imag == 0.0 and gm.imag == 0.0
    if real_pair:
        if gp.real <= 0 or gm.real <= 0:
            raise NonPhysicalPoles("real rates must both be positive")
    else:
        scale = max(abs(gp), abs(gm))
        if abs(gp - gm.conjugate()) > 1e-12 * scale:
            raise NonPhysicalPoles("complex rates must be conjugates of each other")
        if gp.real <= 0:
            raise NonPhysicalPoles("complex rates need a positive real part")
    density = ParametricDensity(g.real, gp, gm)
    if check_normalization:
        residual = abs(density.average(lambda w: 1.0) - 1.0)
        if residual > 1e-9:
            raise NonPhysicalPoles(
                f"normalization residual {residual:.3e} exceeds 1e-9; "
                "rate triple does not produce a valid weight"
            )
    return density


def density_value(sd: SpectralDensity, omega):
    """Evaluate the weight at omega (>= 0)."""
    return sd.value(omega)


def weighted_average(sd: SpectralDensity, f, rel_tol=config.REL_TOL) -> float:
    """Average of f(omega) under the spectral weight."""
    return sd.average(f, rel_tol=rel_tol)


def closed_form_moments(sd: ParametricDensity) -> MomentSet:
    """First, inverse-first and second moments of the rational weight in
    closed form (principal-branch logarithms; the combination is real).

    Raises DegenerateRates when two rates coincide and the partial-fraction
    denominators collapse.
    """
    if not isinstance(sd, ParametricDensity):
        raise TypeError("closed-form moments exist for the parametric weight only")
    a, b, c = sd.rates
    scale = max(abs(a), abs(b), abs(c))
    for x, y in ((a, b), (b, c), (c, a)):
        if abs(x - y) <= 1e-12 * scale:
            raise DegenerateRates(
                f"rates {x} and {y} coincide within 1e-12; use quadrature instead"
            )
    denom = (a - b) * (b - c) * (c - a)
    log_ab = np.log(b / a)
    log_bc = np.log(c / b)
    log_ca = np.log(a / c)
    mean = (2.0 / np.pi) * (
        a * a * b * b * log_ab + b * b * c * c * log_bc + c * c * a * a * log_ca
    ) / denom
    inv = (2.0 / np.pi) * (
        c * c * log_ab + a * a * log_bc + b * b * log_ca
    ) / denom
    for name, z in (("mean", mean), ("inverse mean", inv)):
        if abs(z.imag) > 1e-12 * max(1.0, abs(z.real)):
            raise NonPhysicalPoles(f"{name} came out complex: {z}")
    return MomentSet(
        mean_omega=float(mean.real),
        mean_inv_omega=float(inv.real),
        omega0_sq=sd.omega0_sq,
    )


def validate(sd: SpectralDensity, phys_tol: float = config.PHYS_TOL,
             grid_points: int = 10_000) -> ValidationReport:
    """Run every physics check and report; never raises on a failure.

    Checks: unit normalisation, vanishing weight at zero frequency,
    non-negativity on a wide log grid, mean**2 <= second moment, and the
    Cauchy-Schwartz bound mean * inverse-mean >= 1.
    """
    norm = sd.average(lambda w: 1.0)
    mean = sd.average(lambda w: w)
    inv = sd.average(lambda w: 1.0 / w if w > 0 else 0.0)
    second = sd.omega0_sq
    pi0 = float(sd.value(0.0))
    hi = sd.head_cut()
    grid = np.geomspace(hi * 1e-8, hi, grid_points)
    min_val = float(np.min(sd.value(grid)))
    cs = mean * inv
    passed = {
        "normalization": abs(norm - 1.0) <= phys_tol,
        "zero_frequency": abs(pi0) <= phys_tol,
        "non_negative": min_val >= -phys_tol,
        "mean_below_rms": mean * mean <= second + phys_tol,
        "cauchy_schwartz": cs >= 1.0 - phys_tol,
    }
    return ValidationReport(
        normalization_residual=abs(norm - 1.0),
        pi_at_zero=pi0,
        second_moment=second,
        mean_omega=mean,
        mean_inv_omega=inv,
        cauchy_schwartz_product=cs,
        min_value_on_grid=min_val,
        passed=passed,
    )


def write_density_csv(sd: TabulatedDensity, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "pi"])
        for w, v in zip(sd.omega_grid, sd.values):
            writer.writerow([format(w, ".17g"), format(v, ".17g")])


def read_density_csv(path, tail_exponent: float = 4.0) -> TabulatedDensity:
    grid = []
    vals = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["omega", "pi"]:
            raise ValueError(f"expected header 'omega,pi', got {header!r}")
        for row in reader:
            if not row:
                continue
            grid.append(float(row[0]))
            vals.append(float(row[1]))
    return TabulatedDensity(np.array(grid), np.array(vals), tail_exponent=tail_exponent)
