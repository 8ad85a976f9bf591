import numpy as np
import pytest
from scipy.integrate import simpson

from dampo import bath
from dampo.errors import DivergentKernel, NonDecayedKernel


@pytest.fixture()
def ohmic():
    return bath.OhmicBath(gamma=2.0, omega_c=50.0, m=1.0)


class TestOhmicKernel:
    def test_value_at_zero(self, ohmic):
        k = bath.ohmic_kernel(ohmic, np.array([0.0]))
        assert k.kappa0 == pytest.approx(2.0 * 2.0 * 50.0 / np.pi, rel=1e-15)
        # the bath object carries the same expression verbatim
        assert ohmic.kappa0 == 2.0 * 2.0 * 50.0 / np.pi

    def test_half_width(self, ohmic):
        k = bath.ohmic_kernel(ohmic, np.array([0.0, 1.0 / 50.0]))
        assert k.kappa[1] == pytest.approx(k.kappa0 / 2.0, rel=1e-14)

    def test_time_integral_is_damping_rate(self, ohmic):
        t = np.linspace(0.0, 100.0 / ohmic.omega_c, 8001)
        k = bath.ohmic_kernel(ohmic, t)
        assert bath.markov_damping(k) == pytest.approx(ohmic.gamma, rel=1e-4)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            bath.OhmicBath(gamma=-1.0, omega_c=50.0)


class TestKernelFromDensity:
    def test_matches_closed_form(self, ohmic):
        grid = np.linspace(0.0, 40.0 * ohmic.omega_c, 8192)
        j_vals = ohmic.spectral_function(grid)
        t = np.linspace(0.0, 50.0 / ohmic.omega_c, 301)
        got = bath.kernel_from_density(grid, j_vals, ohmic.m, t,
                                       interpolation="spline")
        want = bath.ohmic_kernel(ohmic, t)
        assert np.max(np.abs(got.kappa - want.kappa)) < 1e-7

    def test_zero_spectral_function(self):
        grid = np.linspace(0.0, 10.0, 100)
        k = bath.kernel_from_density(grid, np.zeros(100), 1.0, np.linspace(0, 1, 5))
        assert np.all(k.kappa == 0.0)

    def test_long_time_decay(self, ohmic):
        grid = np.linspace(0.0, 40.0 * ohmic.omega_c, 8192)
        j_vals = ohmic.spectral_function(grid)
        k = bath.kernel_from_density(grid, j_vals, 1.0, np.array([0.0, 50.0]),
                                     interpolation="spline")
        assert abs(k.kappa[1]) < 1e-3 * k.kappa0

    def test_divergent_at_zero(self):
        grid = np.linspace(0.0, 10.0, 100)
        j_vals = np.full(100, 0.3)
        with pytest.raises(DivergentKernel):
            bath.kernel_from_density(grid, j_vals, 1.0, np.linspace(0, 1, 5))


class TestFrequencyConstraints:
    def test_bound_cases(self):
        b = bath.OhmicBath(gamma=1.0, omega_c=100.0)
        # kappa0 = 200/pi ~ 63.66
        ok = bath.frequency_constraints(b, Omega0=np.sqrt(70.0))
        assert ok.bound_satisfied and ok.omega0_positive
        bad = bath.frequency_constraints(b, Omega0=np.sqrt(60.0))
        assert not bad.bound_satisfied

    def test_vanishing_long_time_frequency_allowed(self):
        b = bath.OhmicBath(gamma=1.0, omega_c=10.0)
        rep = bath.frequency_constraints(b, omega0=1e-9)
        assert rep.bound_satisfied
        assert rep.Omega0_sq == pytest.approx(b.kappa0, rel=1e-9)

    def test_consistency_reconstruction(self):
        b = bath.OhmicBath(gamma=0.3, omega_c=20.0)
        rep = bath.frequency_constraints(b, omega0=1.2)
        assert rep.Omega0_sq == pytest.approx(1.44 + b.kappa0, rel=1e-14)
        both = bath.frequency_constraints(
            b, Omega0=np.sqrt(rep.Omega0_sq), omega0=1.2
        )
        assert both.consistent

    def test_inconsistent_pair_flagged(self):
        b = bath.OhmicBath(gamma=0.3, omega_c=20.0)
        rep = bath.frequency_constraints(b, Omega0=5.0, omega0=1.2)
        assert not rep.consistent


class TestMarkovDamping:
    def test_zero_kernel(self):
        k = bath.MemoryKernel(np.linspace(0, 1, 10), np.zeros(10))
        assert bath.markov_damping(k) == 0.0

    def test_truncated_window_partial_integral(self, ohmic):
        # the analytic partial integral up to t = 1/omega_c is gamma/2;
        # markov_damping refuses such an undecayed window
        t = np.linspace(0.0, 1.0 / ohmic.omega_c, 2001)
        k = bath.ohmic_kernel(ohmic, t)
        assert simpson(k.kappa, x=t) == pytest.approx(ohmic.gamma / 2.0, rel=1e-6)
        with pytest.raises(NonDecayedKernel):
            bath.markov_damping(k)


class TestCsv:
    def test_kernel_round_trip(self, tmp_path, ohmic):
        t = np.linspace(0, 0.1, 11)
        k = bath.ohmic_kernel(ohmic, t)
        path = tmp_path / "kernel.csv"
        bath.write_kernel_csv(k, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,kappa"
        assert len(lines) == 12

    def test_spectral_function_reader(self, tmp_path):
        path = tmp_path / "J.csv"
        path.write_text("omega,J\n0,0\n1,0.5\n2,0.3\n")
        grid, vals = bath.read_spectral_function_csv(path)
        np.testing.assert_array_equal(grid, [0.0, 1.0, 2.0])
        np.testing.assert_array_equal(vals, [0.0, 0.5, 0.3])
