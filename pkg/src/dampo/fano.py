"""Exact diagonalisation of the oscillator-reservoir coupling.

Given the coupling amplitude V(omega) of the bilinear oscillator-continuum
interaction, the full Hamiltonian is rewritten as a continuum of uncoupled
dressed modes.  The expansion coefficients follow from a resonance
function Y(omega): its zero marks the dressed resonance, 1/(Y - i pi)
carries the line shape, and the principal-value integral inside Y is the
level-shift function.  The oscillator's spectral weight is then

    pi(omega) = |alpha(omega)|^2 * 4 Omega0 omega / (Omega0 + omega)^2 .

Principal values are computed by singularity subtraction: the node sums
run over Gauss panels aligned with the coupling table's knots, and the
subtracted logarithm is restored analytically.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import _core, quadrature
from .bath import OhmicBath
from .errors import DivergentIntegral, ValidationFailure, ZeroCoupling
from .spectral import TabulatedDensity, validate

__all__ = [
    "CouplingSpectrum",
    "FanoCoefficients",
    "PositivityReport",
    "KernelTables",
    "coupling_from_ohmic",
    "positivity_check",
    "level_shift",
    "y_function",
    "alpha_beta",
    "density_from_coupling",
    "gamma_delta_kernels",
    "read_coupling_csv",
    "write_coupling_csv",
]

# Gauss order per coupling-table interval for the PV node sets.
_PV_ORDER = 12


@dataclass(frozen=True)
class CouplingSpectrum:
    """Real coupling amplitude V(omega) tabulated on an ascending grid.

    V vanishes identically beyond the cutoff (which defaults to the end
    of the grid); in between, V is interpolated with a monotone cubic.
    Units: V^2 has units of frequency, so V carries frequency^(1/2).
    """

    omega_grid: np.ndarray
    v_values: np.ndarray
    cutoff: float | None = None

    def __post_init__(self):
        grid = np.asarray(self.omega_grid, dtype=np.float64)
        vals = np.asarray(self.v_values, dtype=np.float64)
        if grid.ndim != 1 or grid.size < 4:
            raise ValueError("coupling table needs at least four grid points")
        if np.any(np.diff(grid) <= 0) or grid[0] < 0:
            raise ValueError("grid must be strictly ascending and non-negative")
        if vals.shape != grid.shape:
            raise ValueError("v_values must match the grid")
        object.__setattr__(self, "omega_grid", grid)
        object.__setattr__(self, "v_values", vals)
        cut = self.cutoff if self.cutoff is not None else float(grid[-1])
        object.__setattr__(self, "cutoff", float(min(cut, grid[-1])))

    @cached_property
    def _interp(self):
        return PchipInterpolator(self.omega_grid, self.v_values, extrapolate=False)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.omega_grid[0]), self.cutoff

    def v(self, omega):
        omega = np.asarray(omega, dtype=np.float64)
        scalar = omega.ndim == 0
        omega = np.atleast_1d(omega)
        out = np.zeros_like(omega)
        lo, hi = self.support
        inside = (omega >= lo) & (omega <= hi)
        out[inside] = np.nan_to_num(self._interp(omega[inside]), nan=0.0)
        return float(out[0]) if scalar else out

    def v_sq(self, omega):
        val = self.v(omega)
        return val * val

    @classmethod
    def from_function(cls, fn, omega_grid, cutoff=None) -> "CouplingSpectrum":
        grid = np.asarray(omega_grid, dtype=np.float64)
        return cls(grid, np.asarray(fn(grid), dtype=np.float64), cutoff)


def coupling_from_ohmic(b: OhmicBath, Omega0: float, omega_max: float | None = None,
                        n_points: int = 2048) -> CouplingSpectrum:
    """Coupling amplitude equivalent to an Ohmic spectral function.

    Matching the friction kernel written in the two parameterisations,
    kappa(t) = Omega0 int V^2(w)/w cos(wt) dw = (2/pi m) int J(w)/w cos(wt) dw,
    gives V^2 = 2 J / (pi m Omega0); the mass cancels for the Ohmic form.
    """
    if omega_max is None:
        omega_max = 40.0 * b.omega_c
    # quadratic grading toward zero: V ~ sqrt(omega) has a cusp there that
    # a uniform grid would interpolate poorly
    grid = omega_max * np.linspace(0.0, 1.0, n_points) ** 2
    v_sq = 2.0 * b.spectral_function(grid) / (np.pi * b.m * Omega0)
    return CouplingSpectrum(grid, np.sqrt(v_sq))


class _PVNodes:
    """Gauss nodes over the coupling support with V^2 pre-evaluated."""

    def __init__(self, coupling: CouplingSpectrum, order: int = _PV_ORDER):
        lo, hi = coupling.support
        grid = coupling.omega_grid
        edges = grid[(grid >= lo) & (grid <= hi)]
        if edges[0] > lo:
            edges = np.concatenate(([lo], edges))
        if edges[-1] < hi:
            edges = np.concatenate((edges, [hi]))
        self.a = float(edges[0])
        self.b = float(edges[-1])
        self.nodes, self.weights = quadrature.panel_nodes(edges, order=order)
        self.f_nodes = coupling.v_sq(self.nodes)
        self.coupling = coupling

    def integral(self, fn_of_nodes) -> float:
        return float(np.dot(self.weights, fn_of_nodes(self.nodes)))

    def shift_integral(self, omega):
        """4F(omega) = PV int (1/(w-w') - 1/(w+w')) V^2(w') dw' for omega
        strictly inside the support."""
        omega = np.atleast_1d(np.asarray(omega, dtype=np.float64))
        f_t = self.coupling.v_sq(omega)
        pv = _core.pv_sums(omega, f_t, self.nodes, self.weights, self.f_nodes)
        pv += f_t * quadrature.pv_log_term(omega, self.a, self.b)
        wf = self.weights * self.f_nodes
        plus = np.empty(omega.size)
        chunk = max(1, 4_000_000 // max(self.nodes.size, 1))
        for i in range(0, omega.size, chunk):
            plus[i : i + chunk] = (
                wf[None, :] / (omega[i : i + chunk, None] + self.nodes[None, :])
            ).sum(axis=1)
        return pv - plus


_PV_CACHE: dict[int, _PVNodes] = {}


def _pv_nodes(coupling: CouplingSpectrum) -> _PVNodes:
    key = id(coupling)
    cached = _PV_CACHE.get(key)
    if cached is None or cached.coupling is not coupling:
        cached = _PVNodes(coupling)
        if len(_PV_CACHE) > 16:
            _PV_CACHE.clear()
        _PV_CACHE[key] = cached
    return cached


@dataclass(frozen=True)
class PositivityReport:
    integral: float
    ok: bool


def positivity_check(coupling: CouplingSpectrum, Omega0: float) -> PositivityReport:
    """Hamiltonian positivity: int V^2/omega domega must stay below Omega0."""
    lo, _ = coupling.support
    if lo == 0.0 and abs(coupling.v_values[0]) > 0.0:
        raise DivergentIntegral(
            "V(0) != 0 makes V^2/omega non-integrable at zero frequency"
        )
    pv = _pv_nodes(coupling)
    integral = pv.integral(lambda w: coupling.v_sq(w) / w)
    return PositivityReport(integral=integral, ok=bool(integral < Omega0))


def level_shift(coupling: CouplingSpectrum, omega):
    """Level-shift function F(omega) (one quarter of the PV integral that
    shifts the resonance away from the bare frequency)."""
    return 0.25 * _pv_nodes(coupling).shift_integral(omega)


def _resonance_gap(coupling: CouplingSpectrum, Omega0: float, omega):
    """g(omega) = V^2 Y = 2 (omega^2 - Omega0^2)/Omega0 - 4 F(omega)."""
    omega = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    return 2.0 * (omega * omega - Omega0 * Omega0) / Omega0 - _pv_nodes(
        coupling
    ).shift_integral(omega)


def y_function(coupling: CouplingSpectrum, Omega0: float, omega):
    """Resonance function Y(omega); its zero marks the dressed resonance.

    Undefined where the coupling vanishes (ZeroCoupling).
    """
    omega_arr = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    v2 = coupling.v_sq(omega_arr)
    if np.any(v2 == 0.0):
        raise ZeroCoupling("Y(omega) is undefined where V(omega) = 0")
    out = _resonance_gap(coupling, Omega0, omega_arr) / v2
    return float(out[0]) if np.ndim(omega) == 0 else out


@dataclass
class FanoCoefficients:
    """Diagonalisation coefficients sampled on an adaptive frequency grid."""

    omega_grid: np.ndarray
    y: np.ndarray
    alpha_sq: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    f_shift: np.ndarray
    Omega0: float
    resonance: float
    resonance_width: float
    coupling: CouplingSpectrum


def _find_resonance(coupling: CouplingSpectrum, Omega0: float,
                    probe: np.ndarray) -> float:
    gap = _resonance_gap(coupling, Omega0, probe)
    signs = np.sign(gap)
    crossings = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    if crossings.size == 0:
        raise ValidationFailure(
            "no dressed resonance inside the coupling band; the diagonalisation "
            "would need a discrete mode outside the continuum"
        )
    # pick the crossing closest to the bare frequency
    mids = 0.5 * (probe[crossings] + probe[crossings + 1])
    i = crossings[np.argmin(np.abs(mids - Omega0))]
    return brentq(
        lambda w: float(_resonance_gap(coupling, Omega0, w)[0]),
        probe[i], probe[i + 1], xtol=1e-14, rtol=1e-14,
    )


def alpha_beta(coupling: CouplingSpectrum, Omega0: float, n_base: int = 2048,
               n_refine: int = 1601, refine_halfwidths: float = 5.0) -> FanoCoefficients:
    """Compute the diagonalisation coefficients over the coupling band.

    The grid is geometric over the band plus a dense linear patch around
    the resonance (the only sharp feature at weak coupling).  The phase
    convention makes alpha = (omega + Omega0) V / (Omega0 (g - i pi V^2))
    with g the resonance gap; beta follows as the rigid ratio
    (omega - Omega0)/(omega + Omega0) alpha and vanishes at the bare
    frequency.
    """
    report = positivity_check(coupling, Omega0)
    if not report.ok:
        raise ValidationFailure(
            f"positivity violated: int V^2/omega = {report.integral:.6g} >= {Omega0}"
        )
    lo, hi = coupling.support
    pad = (hi - lo) * 1e-7
    lo_in = lo + pad if lo > 0 else max(hi * 1e-6, pad)
    hi_in = hi - pad
    base = np.geomspace(lo_in, hi_in, n_base)
    root = _find_resonance(coupling, Omega0, base)
    if abs(root - Omega0) > 0.25 * Omega0:
        warnings.warn(
            f"dressed resonance {root:.4g} is more than 25% away from the bare "
            f"frequency {Omega0:.4g}; large level shifts are outside the "
            "validated regime",
            stacklevel=2,
        )
    width = 0.5 * np.pi * coupling.v_sq(root)
    core = width * np.linspace(-refine_halfwidths, refine_halfwidths, n_refine)
    # geometric fan-out over the resonance wings until the base grid takes over
    wings = width * np.geomspace(refine_halfwidths, 60.0 * refine_halfwidths, 96)
    patch = root + np.concatenate((-wings[::-1], core, wings))
    patch = patch[(patch > lo_in) & (patch < hi_in)]
    grid = np.unique(np.concatenate((base, patch, [root])))

    v = coupling.v(grid)
    v2 = v * v
    gap = _resonance_gap(coupling, Omega0, grid)
    denom = gap * gap + np.pi**2 * v2 * v2
    pref = (grid + Omega0) / Omega0
    with np.errstate(invalid="ignore", divide="ignore"):
        y = np.where(v2 > 0.0, gap / v2, np.inf)
        alpha_sq = np.where(denom > 0.0, pref**2 * v2 / denom, 0.0)
        alpha = np.where(denom > 0.0, pref * v / (gap - 1j * np.pi * v2), 0.0)
    beta = (grid - Omega0) / (grid + Omega0) * alpha
    f_shift = 0.5 * (grid * grid - Omega0 * Omega0) / Omega0 - 0.25 * gap
    return FanoCoefficients(
        omega_grid=grid, y=y, alpha_sq=alpha_sq, alpha=alpha, beta=beta,
        f_shift=f_shift, Omega0=Omega0, resonance=root, resonance_width=width,
        coupling=coupling,
    )


def density_from_coupling(coupling: CouplingSpectrum, Omega0: float,
                          coeffs: FanoCoefficients | None = None,
                          phys_tol: float = 1e-6) -> TabulatedDensity:
    """Spectral weight induced by the coupling, as a tabulated density.

    The weight vanishes identically beyond the coupling band, so the tail
    coefficient is zero.  The result must pass the physics validation
    (unit norm etc.); otherwise ValidationFailure carries the report.
    """
    if coeffs is None:
        coeffs = alpha_beta(coupling, Omega0)
    w = coeffs.omega_grid
    values = coeffs.alpha_sq * 4.0 * Omega0 * w / (Omega0 + w) ** 2
    density = TabulatedDensity(w, np.clip(values, 0.0, None), tail_exponent=4.0,
                               tail_coef=0.0, kind="fano-derived",
                               interpolation="spline")
    report = validate(density, phys_tol=phys_tol)
    if not report.all_passed():
        raise ValidationFailure("induced spectral weight failed validation",
                                report=report)
    return density


@dataclass
class KernelTables:
    """Bath-mode coefficient tables.

    `delta` is an ordinary dense table.  The singular coefficient is kept
    split: `gamma_pv_prefactor[i, j]` multiplies the principal value
    1/(omega_i - omega'_j) on integration, and `gamma_diag_weight[i]`
    carries the on-diagonal delta-function weight Y(omega_i) times the
    same prefactor; a naive pointwise table across the singularity would
    be meaningless.
    """

    omega: np.ndarray
    omega_prime: np.ndarray
    delta: np.ndarray
    gamma_pv_prefactor: np.ndarray
    gamma_diag_weight: np.ndarray


def gamma_delta_kernels(coeffs: FanoCoefficients, coupling: CouplingSpectrum | None = None,
                        n_table: int = 256) -> KernelTables:
    """Tabulate the bath-mode expansion coefficients on a decimated grid."""
    if coupling is None:
        coupling = coeffs.coupling
    idx = np.unique(np.linspace(0, coeffs.omega_grid.size - 1, n_table).astype(int))
    w = coeffs.omega_grid[idx]
    alpha = coeffs.alpha[idx]
    y = coeffs.y[idx]
    wp = w.copy()
    vp = coupling.v(wp)
    pref = coeffs.Omega0 * alpha[:, None] * vp[None, :] / (w[:, None] + coeffs.Omega0)
    delta = pref / (w[:, None] + wp[None, :])
    diag = np.where(np.isfinite(y), y, 0.0) * coeffs.Omega0 * alpha * coupling.v(w) \
        / (w + coeffs.Omega0)
    return KernelTables(
        omega=w, omega_prime=wp, delta=delta,
        gamma_pv_prefactor=pref, gamma_diag_weight=diag,
    )


def write_coupling_csv(coupling: CouplingSpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "v"])
        for w, v in zip(coupling.omega_grid, coupling.v_values):
            writer.writerow([format(w, ".17g"), format(v, ".17g")])


def read_coupling_csv(path, cutoff: float | None = None) -> CouplingSpectrum:
    grid = []
    vals = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["omega", "v"]:
            raise ValueError(f"expected header 'omega,v', got {header!r}")
        for row in reader:
            if not row:
                continue
            grid.append(float(row[0]))
            vals.append(float(row[1]))
    return CouplingSpectrum(np.array(grid), np.array(vals), cutoff)
