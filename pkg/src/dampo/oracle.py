"""Discrete-bath oracle: exact evolution of the coupled quadratic model.

A finite reservoir of N modes stands in for the continuum; the coupled
quadratic form is diagonalised exactly (one symmetric eigenproblem) and
first and second moments are propagated by rotating the normal modes, so
there is no step-size error at any time.  Finite N shows up only as the
revival after roughly the inverse mode spacing, which bounds the window
in which the oracle can arbitrate continuum claims.

Bath modes start thermally: each mode of frequency w carries quadrature
variances coth(beta w / 2)/2 in natural units, which reproduces every
single-reservoir expectation value of the thermal state.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss

from .bath import MemoryKernel, OhmicBath
from .errors import PositivityViolation, RecurrenceWindowExceeded
from .fano import coupling_from_ohmic
from .states import GaussianState

__all__ = [
    "DiscreteBath",
    "CovarianceTrajectory",
    "discretize",
    "evolve_means_discrete",
    "evolve_covariance_discrete",
    "memory_kernel_discrete",
    "global_symplectic_eigenvalues",
    "write_trajectory_csv",
]


@dataclass(frozen=True)
class DiscreteBath:
    """N reservoir modes with effective couplings V_mu (already weighted
    by the quadrature measure, so sums over modes approximate the
    continuum integrals)."""

    omegas: np.ndarray
    couplings: np.ndarray
    m: float
    Omega0: float

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=np.float64)
        v = np.asarray(self.couplings, dtype=np.float64)
        if w.ndim != 1 or v.shape != w.shape:
            raise ValueError("omegas and couplings must be matching 1-d arrays")
        if np.any(w <= 0):
            raise ValueError("bath frequencies must be positive")
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "couplings", v)
        budget = float(np.sum(v * v / w))
        if budget >= self.Omega0:
            raise PositivityViolation(
                f"sum V^2/omega = {budget:.6g} >= Omega0 = {self.Omega0:.6g}; "
                "the quadratic form is unbounded from below"
            )

    @property
    def n_modes(self) -> int:
        return int(self.omegas.size)

    @property
    def recurrence_time(self) -> float:
        """Revival estimate 2 pi / (minimal mode spacing)."""
        spacing = float(np.min(np.diff(np.sort(self.omegas))))
        return 2.0 * np.pi / spacing

    @property
    def omega0_sq(self) -> float:
        """Long-time frequency squared of this finite model,
        Omega0^2 - Omega0 * sum V^2/omega."""
        return self.Omega0**2 - self.Omega0 * float(
            np.sum(self.couplings**2 / self.omegas)
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "omegas": self.omegas.tolist(),
                "couplings": self.couplings.tolist(),
                "m": self.m,
                "Omega0": self.Omega0,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "DiscreteBath":
        data = json.loads(text)
        return cls(
            omegas=np.array(data["omegas"]),
            couplings=np.array(data["couplings"]),
            m=float(data["m"]),
            Omega0=float(data["Omega0"]),
        )

    @cached_property
    def _modes(self) -> "_NormalModes":
        return _NormalModes(self)


def discretize(coupling, Omega0: float, m: float, n_modes: int,
               omega_max: float | None = None) -> DiscreteBath:
    """Realise a coupling spectrum as N discrete modes.

    Gauss-Legendre nodes w_mu on [0, omega_max] with V_mu = V(w_mu) sqrt(w_mu's
    weight) preserve sums against smooth functions with spectral accuracy,
    which is exactly what the continuum limit requires.
    """
    if isinstance(coupling, OhmicBath):
        coupling = coupling_from_ohmic(coupling, Omega0)
    if n_modes < 2:
        raise ValueError("need at least two bath modes")
    if omega_max is None:
        omega_max = coupling.support[1]
    x, w = leggauss(n_modes)
    nodes = 0.5 * omega_max * (x + 1.0)
    weights = 0.5 * omega_max * w
    v_mu = coupling.v(nodes) * np.sqrt(weights)
    return DiscreteBath(omegas=nodes, couplings=v_mu, m=m, Omega0=Omega0)


class _NormalModes:
    """Eigen-decomposition of the mass-weighted quadratic form."""

    def __init__(self, bath: DiscreteBath):
        n = bath.n_modes
        d = np.zeros((n + 1, n + 1))
        d[0, 0] = bath.Omega0**2
        idx = np.arange(1, n + 1)
        d[idx, idx] = bath.omegas**2
        cross = bath.couplings * np.sqrt(bath.Omega0 * bath.omegas)
        d[0, idx] = cross
        d[idx, 0] = cross
        evals, evecs = np.linalg.eigh(d)
        if evals[0] <= 0:
            raise PositivityViolation(
                f"quadratic form has a non-positive eigenvalue {evals[0]:.6g}"
            )
        self.freqs = np.sqrt(evals)
        self.vectors = evecs
        self.osc_row = evecs[0, :].copy()
        self.bath = bath

    def mean_coefficients(self, t: float):
        wt = self.freqs * t
        cos_wt = np.cos(wt)
        sin_wt = np.sin(wt)
        return cos_wt, sin_wt


@dataclass
class CovarianceTrajectory:
    times: np.ndarray
    var_x: np.ndarray
    var_p: np.ndarray
    cov_xp: np.ndarray
    mean_x: np.ndarray
    mean_p: np.ndarray

    def state_at(self, i: int) -> GaussianState:
        return GaussianState(
            mean_x=float(self.mean_x[i]),
            mean_p=float(self.mean_p[i]),
            var_x=float(self.var_x[i]),
            var_p=float(self.var_p[i]),
            cov_xp=float(self.cov_xp[i]),
        )


def evolve_means_discrete(bath: DiscreteBath, x0: float, p0: float, times):
    """Exact mean trajectory for a reservoir at rest in expectation.

    The fluctuating force averages to zero, so the means never see the
    temperature; they are carried entirely by the oscillator components
    of the normal modes.
    """
    times = np.ascontiguousarray(times, dtype=np.float64)
    modes = bath._modes
    g = modes.osc_row
    sm = math.sqrt(bath.m)
    q0 = g * (sm * x0)
    qd0 = g * (p0 / sm)
    mean_x = np.empty(times.size)
    mean_p = np.empty(times.size)
    for i, t in enumerate(times):
        cos_wt, sin_wt = modes.mean_coefficients(t)
        u = cos_wt * q0 + sin_wt / modes.freqs * qd0
        v = -modes.freqs * sin_wt * q0 + cos_wt * qd0
        mean_x[i] = np.dot(g, u) / sm
        mean_p[i] = np.dot(g, v) * sm
    return mean_x, mean_p


def _initial_blocks(bath: DiscreteBath, beta: float, initial: GaussianState):
    """Initial covariance blocks in mass-weighted coordinates, rotated to
    the normal-mode basis."""
    n = bath.n_modes
    if math.isinf(beta):
        weight = np.ones(n)
    else:
        weight = 1.0 / np.tanh(0.5 * beta * bath.omegas)
    duu = np.concatenate(([bath.m * initial.var_x], weight / (2.0 * bath.omegas)))
    dvv = np.concatenate(([initial.var_p / bath.m], 0.5 * bath.omegas * weight))
    duv = np.concatenate(([initial.cov_xp], np.zeros(n)))
    e = bath._modes.vectors
    suu = (e.T * duu) @ e
    svv = (e.T * dvv) @ e
    suv = (e.T * duv) @ e
    return suu, svv, suv


def evolve_covariance_discrete(bath: DiscreteBath, beta: float,
                               initial: GaussianState, times,
                               warn_recurrence: bool = True) -> CovarianceTrajectory:
    """Exact second-moment evolution of the oscillator block.

    Parameters
    ----------
    bath:
        Discrete reservoir (couplings already measure-weighted).
    beta:
        Inverse reservoir temperature; math.inf for the vacuum.
    initial:
        Oscillator Gaussian state at t = 0 (uncorrelated with the bath).
    times:
        Evaluation times; a warning fires past 80% of the revival estimate.
    """
    times = np.ascontiguousarray(times, dtype=np.float64)
    if warn_recurrence and times.size and float(times.max()) > 0.8 * bath.recurrence_time:
        warnings.warn(
            f"requested times reach {float(times.max()):.4g}, beyond 80% of the "
            f"revival estimate {bath.recurrence_time:.4g}",
            RecurrenceWindowExceeded,
            stacklevel=2,
        )
    modes = bath._modes
    g = modes.osc_row
    freqs = modes.freqs
    suu, svv, suv = _initial_blocks(bath, beta, initial)
    sm = math.sqrt(bath.m)
    q0 = g * (sm * initial.mean_x)
    qd0 = g * (initial.mean_p / sm)

    var_x = np.empty(times.size)
    var_p = np.empty(times.size)
    cov_xp = np.empty(times.size)
    mean_x = np.empty(times.size)
    mean_p = np.empty(times.size)
    for i, t in enumerate(times):
        cos_wt = np.cos(freqs * t)
        sin_wt = np.sin(freqs * t)
        a = g * cos_wt
        b = g * sin_wt / freqs
        ap = -g * freqs * sin_wt
        bp = g * cos_wt
        suu_a = suu @ a
        svv_b = svv @ b
        suv_b = suv @ b
        suu_ap = suu @ ap
        svv_bp = svv @ bp
        suv_ap = suv @ ap
        suv_bp = suv @ bp
        vu = a @ suu_a + 2.0 * (a @ suv_b) + b @ svv_b
        vv = ap @ suu_ap + 2.0 * (ap @ suv_bp) + bp @ svv_bp
        cuv = a @ suu_ap + a @ suv_bp + b @ suv_ap + b @ svv_bp
        var_x[i] = vu / bath.m
        var_p[i] = vv * bath.m
        cov_xp[i] = cuv
        u = cos_wt * q0 + sin_wt / freqs * qd0
        v = -freqs * sin_wt * q0 + cos_wt * qd0
        mean_x[i] = np.dot(g, u) / sm
        mean_p[i] = np.dot(g, v) * sm
    return CovarianceTrajectory(
        times=times, var_x=var_x, var_p=var_p, cov_xp=cov_xp,
        mean_x=mean_x, mean_p=mean_p,
    )


def memory_kernel_discrete(bath: DiscreteBath, times) -> MemoryKernel:
    """Friction kernel of the finite model, the cosine sum
    sum_mu V_mu^2 (Omega0/omega_mu) cos(omega_mu t)."""
    times = np.ascontiguousarray(times, dtype=np.float64)
    w = bath.omegas
    amp = bath.couplings**2 * bath.Omega0 / w
    kappa = np.cos(np.multiply.outer(times, w)) @ amp
    return MemoryKernel(times=times, kappa=kappa)


def global_symplectic_eigenvalues(bath: DiscreteBath, beta: float,
                                  initial: GaussianState, t: float) -> np.ndarray:
    """Symplectic spectrum of the full (system + bath) covariance at time t.

    For beta = inf and a pure oscillator state every value is 1/2; exact
    propagation must preserve that to rounding.
    """
    modes = bath._modes
    freqs = modes.freqs
    n = freqs.size
    suu, svv, suv = _initial_blocks(bath, beta, initial)
    c = np.cos(freqs * t)
    s = np.sin(freqs * t) / freqs
    sd = -freqs * np.sin(freqs * t)
    # q(t) = c q + s qdot ; qdot(t) = sd q + c qdot, applied on both sides
    qq = (c[:, None] * c[None, :]) * suu + (c[:, None] * s[None, :]) * suv \
        + (s[:, None] * c[None, :]) * suv.T + (s[:, None] * s[None, :]) * svv
    pp = (sd[:, None] * sd[None, :]) * suu + (sd[:, None] * c[None, :]) * suv \
        + (c[:, None] * sd[None, :]) * suv.T + (c[:, None] * c[None, :]) * svv
    qp = (c[:, None] * sd[None, :]) * suu + (c[:, None] * c[None, :]) * suv \
        + (s[:, None] * sd[None, :]) * suv.T + (s[:, None] * c[None, :]) * svv
    sigma = np.block([[qq, qp], [qp.T, pp]])
    omega_form = np.block(
        [[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]]
    )
    spectrum = np.linalg.eigvals(1j * omega_form @ sigma)
    return np.sort(np.abs(spectrum))[n:]


def write_trajectory_csv(traj: CovarianceTrajectory, path,
                         header_comment: str | None = None) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "var_x", "var_p", "cov_xp", "mean_x", "mean_p"])
        for i in range(traj.times.size):
            writer.writerow([
                format(traj.times[i], ".17g"),
                format(traj.var_x[i], ".17g"),
                format(traj.var_p[i], ".17g"),
                format(traj.cov_xp[i], ".17g"),
                format(traj.mean_x[i], ".17g"),
                format(traj.mean_p[i], ".17g"),
            ])
