import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIG_SETS, FROZEN_MOMENTS, fig_density, rate_triples_seeded
from dampo import spectral
from dampo.errors import DegenerateRates, NegativeFrequency, NonPhysicalPoles


class TestParametricConstruction:
    def test_normalization_at_construction(self):
        for fig in FIG_SETS:
            sd = fig_density(fig)
            assert abs(sd.average(lambda w: 1.0) - 1.0) < 1e-9

    def test_second_moment_closed_form(self):
        sd = fig_density("2a")
        assert sd.omega0_sq == pytest.approx(0.1975, abs=1e-15)

    def test_complex_pair_density_real_nonnegative(self):
        sd = fig_density("3b")
        grid = np.geomspace(1e-6, 1e3, 2000)
        vals = sd.value(grid)
        assert np.all(np.isreal(vals))
        assert np.all(vals >= 0.0)

    def test_rejects_mixed_sign_real_pair(self):
        with pytest.raises(NonPhysicalPoles):
            spectral.make_parametric_density(0.1, 0.5, -0.25)

    def test_rejects_non_conjugate_complex(self):
        with pytest.raises(NonPhysicalPoles):
            spectral.make_parametric_density(0.1, 0.5 + 5j, 0.5 - 4j)

    def test_rejects_negative_real_part(self):
        with pytest.raises(NonPhysicalPoles):
            spectral.make_parametric_density(0.1, -0.5 + 5j, -0.5 - 5j)

    def test_rejects_nonpositive_slow_rate(self):
        with pytest.raises(NonPhysicalPoles):
            spectral.make_parametric_density(-1.0, 0.75, 0.25)


class TestDensityValue:
    def test_zero_at_zero_frequency(self):
        for fig in FIG_SETS:
            assert fig_density(fig).value(0.0) == 0.0

    def test_negative_frequency_rejected(self):
        with pytest.raises(NegativeFrequency):
            fig_density("2a").value(-0.1)

    def test_inverse_quartic_tail(self):
        sd = fig_density("2a")
        k = (
            (sd.gamma_plus + sd.gamma_minus)
            * (sd.gamma_minus + sd.Gamma)
            * (sd.Gamma + sd.gamma_plus)
        ).real
        w = 5e3
        assert sd.value(w) * w**4 == pytest.approx(2.0 * k / np.pi, rel=1e-6)

    def test_tabulated_hits_stored_nodes(self):
        sd = fig_density("2b")
        tab = spectral.TabulatedDensity.from_parametric(sd, n_points=900)
        idx = [0, 13, 450, 899]
        for i in idx:
            assert tab.value(tab.omega_grid[i]) == pytest.approx(
                tab.values[i], rel=0, abs=1e-300
            )


class TestWeightedAverage:
    def test_unit_average(self):
        assert fig_density("3a").average(lambda w: 1.0) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("fig", sorted(FIG_SETS))
    def test_frozen_moments(self, fig):
        sd = fig_density(fig)
        mean, inv, second = FROZEN_MOMENTS[fig]
        assert sd.average(lambda w: w) == pytest.approx(mean, rel=1e-9)
        assert sd.average(lambda w: 1.0 / w) == pytest.approx(inv, rel=1e-9)
        assert sd.average(lambda w: w * w) == pytest.approx(second, rel=1e-9)

    def test_subdivision_doubling_invariance(self):
        sd = fig_density("2b")
        a = sd.average(lambda w: w, limit=200)
        b = sd.average(lambda w: w, limit=400)
        assert a == pytest.approx(b, rel=1e-9)

    def test_tabulated_order_doubling_invariance(self):
        tab = spectral.TabulatedDensity.from_parametric(fig_density("3a"))
        a = tab.average(lambda w: w, order=10)
        b = tab.average(lambda w: w, order=20)
        assert a == pytest.approx(b, rel=1e-7)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_nonconvergence_reported_with_residual(self):
        from dampo.errors import QuadratureNonConvergence

        sd = fig_density("2a")
        # an essentially random-phase integrand the adaptive engine cannot
        # resolve at the requested tolerance
        with pytest.raises(QuadratureNonConvergence) as exc:
            sd.average(lambda w: np.cos(1e7 * w), limit=30)
        assert exc.value.residual is None or exc.value.residual >= 0.0


class TestClosedFormMoments:
    @pytest.mark.parametrize("fig", sorted(FIG_SETS))
    def test_matches_frozen_quadrature(self, fig):
        mom = spectral.closed_form_moments(fig_density(fig))
        mean, inv, second = FROZEN_MOMENTS[fig]
        assert mom.mean_omega == pytest.approx(mean, rel=1e-10)
        assert mom.mean_inv_omega == pytest.approx(inv, rel=1e-10)
        assert mom.omega0_sq == pytest.approx(second, rel=1e-12)

    def test_random_sweep_against_quadrature(self):
        rng = np.random.default_rng(20240817)
        for big_gamma, gp, gm in rate_triples_seeded(rng, 50):
            sd = spectral.make_parametric_density(big_gamma, gp, gm)
            mom = spectral.closed_form_moments(sd)
            assert sd.average(lambda w: w) == pytest.approx(mom.mean_omega, rel=1e-8)
            assert sd.average(lambda w: 1.0 / w) == pytest.approx(
                mom.mean_inv_omega, rel=1e-8
            )

    def test_cauchy_schwartz_product(self):
        rng = np.random.default_rng(7)
        for big_gamma, gp, gm in rate_triples_seeded(rng, 20):
            mom = spectral.closed_form_moments(
                spectral.make_parametric_density(big_gamma, gp, gm)
            )
            assert mom.mean_omega * mom.mean_inv_omega >= 1.0

    def test_degenerate_rates_rejected(self):
        sd = spectral.ParametricDensity(0.5, 0.5 + 1e-14, 0.25)
        with pytest.raises(DegenerateRates):
            spectral.closed_form_moments(sd)


class TestValidate:
    def test_reference_density_passes(self):
        report = spectral.validate(fig_density("2a"))
        assert report.all_passed()
        assert report.cauchy_schwartz_product > 1.0

    def test_nonzero_weight_at_zero_flagged(self):
        grid = np.linspace(0.0, 10.0, 200)
        vals = np.full(200, 0.1)
        sd = spectral.TabulatedDensity(grid, vals, tail_exponent=4.0)
        report = spectral.validate(sd)
        assert not report.passed["zero_frequency"]
        assert report.pi_at_zero == pytest.approx(0.1)

    def test_narrow_peak_saturates_cauchy_schwartz(self):
        centre, sigma = 2.0, 0.004
        grid = np.linspace(centre - 12 * sigma, centre + 12 * sigma, 1500)
        vals = np.exp(-0.5 * ((grid - centre) / sigma) ** 2)
        vals /= np.trapezoid(vals, grid)
        sd = spectral.TabulatedDensity(grid, vals, tail_exponent=4.0, tail_coef=0.0)
        report = spectral.validate(sd)
        assert report.passed["cauchy_schwartz"]
        assert 1.0 <= report.cauchy_schwartz_product < 1.0001


@st.composite
def valid_triples(draw):
    big_gamma = 10.0 ** draw(st.floats(-2, 1))
    if draw(st.booleans()):
        gp = draw(st.floats(0.02, 10.0))
        gm = draw(st.floats(0.02, 10.0))
        return big_gamma, complex(gp), complex(gm)
    re = draw(st.floats(0.02, 5.0))
    im = draw(st.floats(0.1, 10.0))
    return big_gamma, complex(re, im), complex(re, -im)


class TestProperties:
    @settings(max_examples=40, deadline=None)
    @given(valid_triples())
    def test_weight_nonnegative_and_vanishing_at_zero(self, triple):
        sd = spectral.make_parametric_density(*triple, check_normalization=False)
        grid = np.geomspace(1e-5, 1e4, 500)
        assert np.all(sd.value(grid) >= 0.0)
        assert sd.value(0.0) == 0.0

    @settings(max_examples=25, deadline=None)
    @given(valid_triples())
    def test_normalized_and_moment_inequalities(self, triple):
        sd = spectral.make_parametric_density(*triple)
        mean = sd.average(lambda w: w)
        inv = sd.average(lambda w: 1.0 / w)
        assert mean * mean <= sd.omega0_sq * (1 + 1e-9)
        assert mean * inv >= 1.0 - 1e-9


class TestOscillatorParams:
    def test_ordering_enforced(self):
        spectral.OscillatorParams(m=1.0, Omega0=2.0, omega0=1.0)
        with pytest.raises(ValueError):
            spectral.OscillatorParams(m=1.0, Omega0=1.0, omega0=2.0)
        with pytest.raises(ValueError):
            spectral.OscillatorParams(m=-1.0, Omega0=2.0, omega0=1.0)
        with pytest.raises(ValueError):
            spectral.OscillatorParams(m=1.0, Omega0=2.0, omega0=0.0)


class TestCsvRoundTrip:
    def test_round_trip(self, tmp_path):
        tab = spectral.TabulatedDensity.from_parametric(fig_density("2a"), 400)
        path = tmp_path / "density.csv"
        spectral.write_density_csv(tab, path)
        back = spectral.read_density_csv(path, tail_exponent=tab.tail_exponent)
        np.testing.assert_array_equal(back.omega_grid, tab.omega_grid)
        np.testing.assert_array_equal(back.values, tab.values)

    def test_header_enforced(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            spectral.read_density_csv(path)
