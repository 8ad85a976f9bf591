import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fig_density, rate_triples_seeded
from dampo import spectral, states
from dampo.errors import DivergentMoment, NonPhysicalState, UnsupportedOrder


def uncoupled_vacuum(m=1.0, omega=1.0):
    return states.GaussianState(0.0, 0.0, 1.0 / (2 * m * omega), m * omega / 2, 0.0)


class TestThermalWeight:
    def test_zero_temperature_limit(self):
        assert states.thermal_weight(math.inf, 3.7) == 1.0

    def test_high_temperature_expansion(self):
        beta, omega = 1e-4, 2.0
        weight = states.thermal_weight(beta, omega)
        leading = 2.0 / (beta * omega)
        assert weight == pytest.approx(leading, rel=1e-7)
        # next-order term: the residue beyond 2/(beta w) is beta w / 6
        assert weight - leading == pytest.approx(beta * omega / 6.0, rel=1e-6)

    def test_occupancy_identity(self):
        beta, omega = 0.7, 1.3
        n_bar = 1.0 / math.expm1(beta * omega)
        assert states.thermal_weight(beta, omega) - 1.0 == pytest.approx(
            2.0 * n_bar, rel=1e-13
        )


class TestGroundState:
    def test_reference_moments(self):
        sd = fig_density("2a")
        mom = spectral.closed_form_moments(sd)
        g = states.ground_state(sd, m=2.0)
        assert g.var_x == pytest.approx(mom.mean_inv_omega / 4.0, rel=1e-9)
        assert g.var_p == pytest.approx(2.0 * mom.mean_omega / 2.0, rel=1e-9)
        assert g.mean_x == g.mean_p == g.cov_xp == 0.0

    def test_uncertainty_product_exceeds_bound(self):
        g = states.ground_state(fig_density("2a"), m=1.0)
        assert g.uncertainty_product > 0.25

    def test_near_delta_weight_saturates(self):
        sd = spectral.make_parametric_density(1e-3, 1e-3 + 1j, 1e-3 - 1j)
        g = states.ground_state(sd, m=1.0)
        assert g.uncertainty_product == pytest.approx(0.25, abs=2e-3)

    def test_mixture_reading_of_position_variance(self):
        # var_x equals the weight-average of the per-frequency vacuum 1/(2 m w)
        sd = fig_density("3a")
        m = 1.7
        g = states.ground_state(sd, m)
        direct = sd.average(lambda w: 1.0 / (2.0 * m * w))
        assert g.var_x == pytest.approx(direct, rel=1e-10)


class TestThermalState:
    def test_beta_inf_equals_ground(self):
        sd = fig_density("2b")
        g = states.ground_state(sd, 1.0)
        t = states.thermal_state(sd, 1.0, math.inf)
        assert t == g

    def test_high_temperature_kinetic_energy(self):
        sd = fig_density("2b")
        beta = 0.01 / math.sqrt(sd.omega0_sq)
        t = states.thermal_state(sd, 1.0, beta)
        kinetic = t.var_p / 2.0
        assert kinetic == pytest.approx(0.5 / beta, rel=1e-3)

    def test_high_temperature_potential_exceeds_equipartition(self):
        sd = fig_density("2a")
        beta = 0.0225
        t = states.thermal_state(sd, 1.0, beta)
        potential = 0.5 * sd.omega0_sq * t.var_x
        assert potential > 0.5 / beta

    def test_variances_monotone_in_temperature(self):
        sd = fig_density("3b")
        betas = [math.inf, 10.0, 2.0, 0.5, 0.1]
        sts = [states.thermal_state(sd, 1.0, b) for b in betas]
        vx = [s.var_x for s in sts]
        vp = [s.var_p for s in sts]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(vx, vx[1:]))
        assert all(a <= b * (1 + 1e-12) for a, b in zip(vp, vp[1:]))

    def test_divergent_inverse_moment_detected(self):
        grid = np.linspace(0.0, 5.0, 300)
        vals = np.full(300, 0.2)  # finite weight at zero frequency
        sd = spectral.TabulatedDensity(grid, vals, tail_exponent=4.0)
        with pytest.raises(DivergentMoment):
            states.thermal_state(sd, 1.0, beta=1.0)


class TestOscillatorEnergy:
    def test_uncoupled_equality(self):
        omega = 0.77
        e = states.oscillator_energy(uncoupled_vacuum(1.0, omega), 1.0, omega)
        assert e == pytest.approx(omega / 2.0, rel=1e-14)

    def test_ground_energy_bound_random(self):
        rng = np.random.default_rng(51)
        for triple in rate_triples_seeded(rng, 25):
            sd = spectral.make_parametric_density(*triple)
            mom = spectral.closed_form_moments(sd)
            g = states.GaussianState(
                0.0, 0.0, mom.mean_inv_omega / 2.0, mom.mean_omega / 2.0, 0.0
            )
            for f0 in (math.sqrt(mom.omega0_sq), math.sqrt(sd.classical_omega0_sq)):
                assert states.oscillator_energy(g, 1.0, f0) >= f0 / 2.0 - 1e-12

    def test_means_contribute(self):
        s = states.GaussianState(2.0, -1.0, 0.5, 0.5, 0.0)
        e = states.oscillator_energy(s, 1.0, 1.0)
        assert e == pytest.approx((0.5 + 1.0) / 2 + (0.5 + 4.0) / 2)


class TestDiagonalForm:
    def test_uncoupled_vacuum(self):
        d = states.diagonal_form(uncoupled_vacuum(), 1.0)
        assert d.n_bar_c == 0.0
        assert d.entropy == 0.0
        assert d.T_eff == 0.0
        assert d.mutual_information == 0.0

    def test_reference_ground_state(self):
        sd = fig_density("2a")
        mom = spectral.closed_form_moments(sd)
        d = states.diagonal_form(states.ground_state(sd, 1.0), 1.0)
        assert d.omega_diag == pytest.approx(
            math.sqrt(mom.mean_omega / mom.mean_inv_omega), rel=1e-9
        )
        assert d.n_bar_c > 0.0
        assert d.omega_diag < math.sqrt(sd.omega0_sq)

    def test_occupancy_temperature_round_trip(self):
        d = states.diagonal_form(states.ground_state(fig_density("3b"), 1.0), 1.0)
        assert d.n_bar_c == pytest.approx(
            1.0 / math.expm1(d.omega_diag / d.T_eff), rel=1e-12
        )

    def test_effective_energy_combines_moments(self):
        sd = fig_density("2b")
        mom = spectral.closed_form_moments(sd)
        d = states.diagonal_form(states.ground_state(sd, 1.0), 1.0)
        assert (d.n_bar_c + 0.5) * d.omega_diag == pytest.approx(
            mom.mean_omega / 2.0, rel=1e-8
        )

    def test_entropy_matches_symplectic_form(self):
        s = states.GaussianState(0.0, 0.0, 1.3, 0.9, 0.0)
        d = states.diagonal_form(s, 1.0)
        nu = math.sqrt(4.0 * s.var_x * s.var_p) / 2.0
        expected = (nu + 0.5) * math.log(nu + 0.5) - (nu - 0.5) * math.log(nu - 0.5)
        assert d.entropy == pytest.approx(expected, abs=1e-10)
        assert d.mutual_information == pytest.approx(2.0 * expected, abs=1e-10)

    def test_rejects_sub_quantum_state(self):
        s = states.GaussianState(0.0, 0.0, 0.1, 0.1, 0.0)
        with pytest.raises(NonPhysicalState):
            states.diagonal_form(s, 1.0)


class TestCharacteristicFunction:
    def test_unit_at_origin(self):
        g = states.ground_state(fig_density("2a"), 1.0)
        assert states.characteristic_function(g, 1.0, 1.0, 0.0) == 1.0

    def test_bounded_by_one(self):
        g = states.ground_state(fig_density("3b"), 1.0)
        rng = np.random.default_rng(3)
        for _ in range(50):
            xi = complex(*rng.normal(size=2))
            assert states.characteristic_function(g, 1.0, 1.0, xi) <= 1.0

    def test_ground_state_exponents(self):
        sd = fig_density("2a")
        mom = spectral.closed_form_moments(sd)
        om0 = math.sqrt(sd.omega0_sq)
        g = states.ground_state(sd, 1.0)
        chi_r = states.characteristic_function(g, 1.0, om0, 0.3)
        chi_i = states.characteristic_function(g, 1.0, om0, 0.3j)
        assert chi_r == pytest.approx(
            math.exp(-0.5 * (mom.mean_omega / om0) * 0.09), rel=1e-9
        )
        assert chi_i == pytest.approx(
            math.exp(-0.5 * (om0 * mom.mean_inv_omega) * 0.09), rel=1e-9
        )

    def test_second_derivative_recovers_variance(self):
        # curvature of chi along the imaginary axis encodes the stretched
        # quadrature variance
        sd = fig_density("2b")
        g = states.ground_state(sd, 1.0)
        om0 = math.sqrt(sd.omega0_sq)
        h = 1e-4
        chi = lambda x: states.characteristic_function(g, 1.0, om0, 1j * x)
        curv = (chi(h) - 2.0 * chi(0.0) + chi(-h)) / h**2
        expected = -2.0 * om0 * g.var_x  # b = 2 m Omega0 var_x
        assert curv == pytest.approx(expected, rel=1e-6)

    def test_single_mode_thermal_form(self):
        # a single-mode thermal state (variances coth-scaled vacuum) must
        # give exactly exp(-|xi|^2 (2 nbar + 1) / 2); the weak-coupling
        # steady state reduces to this and is checked end to end in the
        # acceptance suite
        m, omega, beta = 1.3, 0.8, 1.2
        coth = 1.0 / math.tanh(beta * omega / 2.0)
        t = states.GaussianState(
            0.0, 0.0, coth / (2 * m * omega), m * omega * coth / 2, 0.0
        )
        n_bar = 1.0 / math.expm1(beta * omega)
        for xi in (0.4, 0.4j, 0.3 + 0.2j):
            got = states.characteristic_function(t, m, omega, xi)
            want = math.exp(-0.5 * abs(xi) ** 2 * (2 * n_bar + 1))
            assert got == pytest.approx(want, rel=1e-12)


class TestSymmetricMoments:
    def test_vacuum_number_moment(self):
        assert states.symmetric_moment(uncoupled_vacuum(), 1.0, 1.0, 1, 1) == 0.5

    def test_odd_moment_vanishes(self):
        g = states.ground_state(fig_density("2a"), 1.0)
        assert states.symmetric_moment(g, 1.0, 1.0, 1, 0) == 0.0

    def test_vacuum_fourth_order(self):
        # hand expansion of the six orderings of adag^2 a^2 on the vacuum
        # averages to 1/2
        got = states.symmetric_moment(uncoupled_vacuum(), 1.0, 1.0, 2, 2)
        assert got == pytest.approx(0.5, rel=1e-14)

    def test_matches_stored_covariance(self):
        sd = fig_density("3a")
        om0 = math.sqrt(sd.omega0_sq)
        g = states.ground_state(sd, 1.0)
        s11 = states.symmetric_moment(g, 1.0, om0, 1, 1)
        s20 = states.symmetric_moment(g, 1.0, om0, 2, 0)
        # reconstruct the quadrature variances: x2 ~ (2 S11 + S20 + S02)
        var_x = (2.0 * s11 + 2.0 * s20) / (2.0 * om0)
        var_p = (2.0 * s11 - 2.0 * s20) * om0 / 2.0
        assert var_x == pytest.approx(g.var_x, rel=1e-9)
        assert var_p == pytest.approx(g.var_p, rel=1e-9)

    def test_order_cap(self):
        with pytest.raises(UnsupportedOrder):
            states.symmetric_moment(uncoupled_vacuum(), 1.0, 1.0, 3, 2)


class TestSerialization:
    def test_json_round_trip(self):
        g = states.ground_state(fig_density("2a"), 1.0)
        back = states.state_from_json(states.state_to_json(g))
        assert back == g

    def test_field_names(self):
        import json

        payload = json.loads(states.state_to_json(uncoupled_vacuum()))
        assert sorted(payload) == ["cov_xp", "mean_p", "mean_x", "var_p", "var_x"]


@settings(max_examples=30, deadline=None)
@given(
    vx=st.floats(0.3, 5.0),
    ratio=st.floats(1.0, 40.0),
)
def test_diagonal_form_consistency(vx, ratio):
    # any physical uncorrelated state: occupancy and entropy behave
    vp = ratio * 0.25 / vx
    s = states.GaussianState(0.0, 0.0, vx, vp, 0.0)
    d = states.diagonal_form(s, 1.0)
    assert d.n_bar_c >= 0.0
    assert d.entropy >= 0.0
    assert d.mutual_information == 2.0 * d.entropy
