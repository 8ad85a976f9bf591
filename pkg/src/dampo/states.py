"""Reduced Gaussian states of the oscillator and derived quantities.

Everything here works in units hbar = k_B = 1.  The reduced state in
the global ground state (and in global thermal equilibrium) is a
zero-mean Gaussian; its variances are weighted averages of the
per-frequency vacuum variances, thermally weighted by coth(beta*omega/2)
at finite temperature.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import config
from .errors import DivergentMoment, NonPhysicalState, UnsupportedOrder
from .spectral import SpectralDensity

__all__ = [
    "GaussianState",
    "DiagonalForm",
    "thermal_weight",
    "ground_state",
    "thermal_state",
    "oscillator_energy",
    "diagonal_form",
    "characteristic_function",
    "symmetric_moment",
    "state_to_json",
    "state_from_json",
]


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of a single-mode Gaussian state."""

    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    cov_xp: float

    def __post_init__(self):
        if self.var_x <= 0 or self.var_p <= 0:
            raise NonPhysicalState("variances must be positive")

    @property
    def uncertainty_product(self) -> float:
        return self.var_x * self.var_p - self.cov_xp**2

    def is_zero_mean(self, tol: float = 0.0) -> bool:
        return abs(self.mean_x) <= tol and abs(self.mean_p) <= tol


@dataclass(frozen=True)
class DiagonalForm:
    """Parameters of the diagonalised reduced density operator."""

    omega_diag: float
    n_bar_c: float
    T_eff: float
    entropy: float
    mutual_information: float


def thermal_weight(beta: float, omega) -> float:
    """coth(beta*omega/2); equals 1 + 2 nbar(omega).  beta=inf gives 1."""
    if beta <= 0:
        raise ValueError("beta must be positive (use math.inf for T = 0)")
    if math.isinf(beta):
        return np.ones_like(np.asarray(omega, dtype=float)) if np.ndim(omega) else 1.0
    return 1.0 / np.tanh(0.5 * beta * np.asarray(omega, dtype=float)) if np.ndim(omega) \
        else 1.0 / math.tanh(0.5 * beta * omega)


def _weighted_moments(sd: SpectralDensity, beta: float, rel_tol: float):
    if math.isinf(beta):
        w_fn = lambda w: 1.0
    else:
        w_fn = lambda w: 1.0 / math.tanh(0.5 * beta * w)
        # the thermally weighted inverse moment needs pi(w)/w^2 integrable
        # at zero, i.e. pi must vanish faster than linearly there
        eps = max(sd.head_cut(), 1.0) * 1e-7
        r_near = float(sd.value(eps)) / eps**2
        r_far = float(sd.value(10.0 * eps)) / (10.0 * eps) ** 2
        if r_near > 9.0 * r_far and r_near > 1e-12:
            raise DivergentMoment(
                "thermally weighted inverse moment diverges: weight does not "
                "vanish fast enough at zero frequency"
            )
    inv = sd.average(lambda w: w_fn(w) / w if w > 0 else 0.0, rel_tol=rel_tol)
    mean = sd.average(lambda w: w_fn(w) * w, rel_tol=rel_tol)
    if not (np.isfinite(inv) and np.isfinite(mean)):
        raise DivergentMoment("weighted moment did not converge")
    return mean, inv


def ground_state(sd: SpectralDensity, m: float, rel_tol=config.REL_TOL) -> GaussianState:
    """Reduced state of the oscillator in the global ground state."""
    mean, inv = _weighted_moments(sd, math.inf, rel_tol)
    return GaussianState(0.0, 0.0, var_x=inv / (2.0 * m), var_p=m * mean / 2.0, cov_xp=0.0)


def thermal_state(sd: SpectralDensity, m: float, beta: float,
                  rel_tol=config.REL_TOL) -> GaussianState:
    """Reduced state in global thermal equilibrium at inverse temperature
    beta (the mean-force Gibbs state); beta = math.inf recovers the ground
    state."""
    mean, inv = _weighted_moments(sd, beta, rel_tol)
    return GaussianState(0.0, 0.0, var_x=inv / (2.0 * m), var_p=m * mean / 2.0, cov_xp=0.0)


def oscillator_energy(state: GaussianState, m: float, f0: float) -> float:
    """Mean oscillator energy  <p^2>/2m + m f0^2 <x^2>/2  at the chosen
    bookkeeping frequency f0 (either natural frequency is legitimate)."""
    if f0 <= 0:
        raise ValueError("f0 must be positive")
    x2 = state.var_x + state.mean_x**2
    p2 = state.var_p + state.mean_p**2
    return p2 / (2.0 * m) + 0.5 * m * f0 * f0 * x2


def diagonal_form(state: GaussianState, m: float, tol: float = 1e-9) -> DiagonalForm:
    """Diagonalise a zero-mean, x-p-uncorrelated Gaussian state.

    Picks the frequency at which the state's quadratures decorrelate,
    making the state an exact Bose-Einstein thermal state of that mode;
    reports the occupancy, the matching effective temperature, the von
    Neumann entropy, and the mutual information with the environment for
    a globally pure state (twice the entropy).
    """
    if not state.is_zero_mean() or state.cov_xp != 0.0:
        raise NonPhysicalState("diagonal form needs a zero-mean, uncorrelated state")
    product = state.var_x * state.var_p
    if product < 0.25 - tol:
        raise NonPhysicalState(
            f"uncertainty product {product:.6g} below the quantum bound 1/4"
        )
    omega_diag = math.sqrt(state.var_p / (m * m * state.var_x))
    n_bar = max(0.0, 0.5 * (math.sqrt(max(4.0 * product, 1.0)) - 1.0))
    if n_bar == 0.0:
        t_eff = 0.0
        entropy = 0.0
    else:
        t_eff = omega_diag / math.log1p(1.0 / n_bar)
        entropy = (n_bar + 1.0) * math.log(n_bar + 1.0) - n_bar * math.log(n_bar)
    return DiagonalForm(
        omega_diag=omega_diag,
        n_bar_c=n_bar,
        T_eff=t_eff,
        entropy=entropy,
        mutual_information=2.0 * entropy,
    )


def _gaussian_exponents(state: GaussianState, m: float, Omega0: float):
    # chi(xi) = exp(-(a xi_r^2 + b xi_i^2)/2) for a zero-mean state;
    # a and b reduce to <<w>>/Omega0 and Omega0 <<1/w>> for ground states
    a = 2.0 * state.var_p / (m * Omega0)
    b = 2.0 * m * Omega0 * state.var_x
    return a, b


def characteristic_function(state: GaussianState, m: float, Omega0: float,
                            xi: complex) -> float:
    """Symmetric-order characteristic function of a zero-mean Gaussian
    state, in the mode convention set by mass m and frequency Omega0."""
    if not state.is_zero_mean():
        raise NonPhysicalState("characteristic function implemented for zero-mean states")
    a, b = _gaussian_exponents(state, m, Omega0)
    xi = complex(xi)
    return math.exp(-0.5 * (a * xi.real**2 + b * xi.imag**2))


def _pairings(slots: tuple[str, ...]):
    if not slots:
        yield ()
        return
    first, rest = slots[0], slots[1:]
    for j in range(len(rest)):
        pair = (first, rest[j])
        remaining = rest[:j] + rest[j + 1:]
        for tail in _pairings(remaining):
            yield (pair,) + tail


def symmetric_moment(state: GaussianState, m: float, Omega0: float,
                     order_dagger: int, order_a: int) -> float:
    """Symmetrically ordered moment S<adag^j a^k> extracted analytically
    from the Gaussian characteristic function (j + k <= 4)."""
    j, k = int(order_dagger), int(order_a)
    if j < 0 or k < 0 or j + k > 4:
        raise UnsupportedOrder("symmetric moments implemented up to total order 4")
    if (j + k) % 2 == 1:
        return 0.0
    if j + k == 0:
        return 1.0
    a, b = _gaussian_exponents(state, m, Omega0)
    same = (b - a) / 4.0     # xi-xi or xi*-xi* contraction
    cross = -(a + b) / 4.0   # xi-xi* contraction
    slots = ("xi",) * j + ("conj",) * k
    total = 0.0
    for pairing in _pairings(slots):
        term = 1.0
        for left, right in pairing:
            term *= cross if left != right else same
        total += term
    return (-1.0) ** k * total


def state_to_json(state: GaussianState) -> str:
    return json.dumps(asdict(state), sort_keys=True)


def state_from_json(text: str) -> GaussianState:
    return GaussianState(**json.loads(text))
