import io

import numpy as np
import pytest

from tauwork.spacetime import (
    DilationProfile,
    StaticSpacetime,
    WeakFieldViolationError,
    Worldline,
    comoving_worldline,
    cruise_worldline,
    dilation_factor,
    dilation_profile,
    point_mass_worldline,
    rest_energy,
    static_hamiltonian,
    uniform_gravity_worldline,
)


class TestDilationFactor:
    def test_comoving_static_observer(self):
        assert dilation_factor(0.0, 0.0, 1.0) == 1.0

    def test_potential_only(self):
        assert dilation_factor(0.2, 0.0, 1.0) == pytest.approx(1.2, abs=1e-15)

    def test_motion_only(self):
        # p^2 / (2 m^2) = 0.02
        assert dilation_factor(0.0, 0.2, 1.0) == pytest.approx(0.98, abs=1e-15)

    def test_large_c_limit(self):
        assert abs(dilation_factor(0.2, 0.2, 1.0, c=1e6) - 1.0) < 1e-12
        assert abs(dilation_factor(0.3, 0.5, 2.0, c=1e8) - 1.0) < 1e-12

    def test_monotone_in_potential_and_speed(self):
        phis = np.linspace(-0.3, 0.3, 13)
        alphas = [dilation_factor(phi, 0.1, 1.0) for phi in phis]
        assert np.all(np.diff(alphas) > 0)
        ps = np.linspace(0.0, 0.5, 11)
        alphas = [dilation_factor(0.1, p, 1.0) for p in ps]
        assert np.all(np.diff(alphas) < 0)

    def test_nonpositive_rate_raises(self):
        with pytest.raises(WeakFieldViolationError):
            dilation_factor(-0.49, 1.2, 1.0)

    def test_bad_arguments(self):
        with pytest.raises(ValueError, match="mass"):
            dilation_factor(0.0, 0.0, -1.0)
        with pytest.raises(ValueError, match="speed of light"):
            dilation_factor(0.0, 0.0, 1.0, c=0.0)


class TestStaticHamiltonian:
    def test_flat_at_rest(self):
        assert static_hamiltonian(-1.0, 0.0, 5.0) == 5.0

    def test_weak_field_value(self):
        # sqrt(1.2) evaluated by hand
        assert static_hamiltonian(-(1 + 2 * 0.1), 0.0, 1.0) == pytest.approx(
            1.0954451150103321, abs=1e-12
        )

    def test_first_order_expansion_residual_scaling(self):
        h_rest = 1.0

        def residual(phi, p):
            exact = static_hamiltonian(-(1 + 2 * phi), p * p, h_rest)
            first_order = h_rest * (1 + phi) + p * p / (2 * h_rest)
            return abs(exact - first_order)

        # halving phi at p=0 shrinks the residual ~4x (phi^2 leading term)
        r1, r2 = residual(0.08, 0.0), residual(0.04, 0.0)
        assert r2 < r1 / 3.2
        # halving p at phi=0 shrinks the residual ~16x (p^4 leading term)
        r1, r2 = residual(0.0, 0.4), residual(0.0, 0.2)
        assert r2 < r1 / 12.0

    def test_rejects_nonnegative_g_tt(self):
        with pytest.raises(ValueError, match="g_tt"):
            static_hamiltonian(0.5, 0.0, 1.0)

    def test_rejects_bad_energies(self):
        with pytest.raises(ValueError, match="rest energy"):
            static_hamiltonian(-1.0, 0.0, 0.0)
        with pytest.raises(ValueError, match="p_sq"):
            static_hamiltonian(-1.0, -0.1, 1.0)


class TestRestEnergy:
    def test_bare_mass(self):
        assert rest_energy(1.0, 0.0) == 1.0

    def test_with_internal_energy(self):
        assert rest_energy(2.0, 0.5) == 2.5

    def test_consistency_with_static_hamiltonian(self):
        assert static_hamiltonian(-1.0, 0.0, rest_energy(2.0, 0.5)) == pytest.approx(2.5)


class TestWorldline:
    def test_requires_two_samples(self):
        with pytest.raises(ValueError, match="2 samples"):
            Worldline([0.0], [0.0], [0.0], 1.0)

    def test_requires_increasing_time(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            Worldline([0.0, 0.0], [0.0, 0.0], [0.0, 0.0], 1.0)

    def test_csv_round_trip(self):
        w = uniform_gravity_worldline(0.01, 10.0, samples=5, p=0.3)
        again = Worldline.from_csv(io.StringIO(w.to_csv()), mass=1.0)
        assert np.array_equal(w.t, again.t)
        assert np.array_equal(w.phi, again.phi)
        assert np.array_equal(w.p, again.p)

    def test_csv_rejects_bad_header(self):
        with pytest.raises(ValueError, match="header"):
            Worldline.from_csv(io.StringIO("time,phi,p\n0,0,0\n1,0,0\n"), mass=1.0)

    def test_csv_rejects_non_numeric(self):
        with pytest.raises(ValueError, match="non-numeric"):
            Worldline.from_csv(io.StringIO("t,phi,p\n0,0,0\n1,x,0\n"), mass=1.0)

    def test_presets(self):
        w = comoving_worldline(5.0, samples=3)
        assert np.all(w.phi == 0) and np.all(w.p == 0)
        w = uniform_gravity_worldline(0.01, 10.0, samples=11)
        np.testing.assert_allclose(w.phi, 0.01 * w.t)
        w = point_mass_worldline(0.05, 2.0, 4.0, 10.0, samples=11)
        np.testing.assert_allclose(w.phi, -0.05 / (2.0 + 0.2 * w.t))
        w = cruise_worldline(0.4, 3.0)
        assert np.all(w.p == 0.4) and np.all(w.phi == 0)


class TestDilationProfile:
    def test_comoving_is_trivial(self):
        prof = dilation_profile(comoving_worldline(5.0, samples=7))
        assert np.all(prof.alpha == 1.0)
        assert prof.tau_total == pytest.approx(5.0, abs=1e-14)
        assert prof.alpha_final == 1.0

    def test_linear_ramp_integral(self):
        # phi = 0.02 t on [0, 10]: integral of (1 + 0.02 t) = 10 + 0.02 * 100 / 2
        w = uniform_gravity_worldline(0.02, 10.0, samples=2001)
        prof = dilation_profile(w)
        assert prof.tau_total == pytest.approx(11.0, abs=1e-6)
        assert np.all(np.diff(prof.tau) > 0)

    def test_quadrature_self_convergence(self):
        # smooth nonlinear potential: trapezoid error drops ~4x per grid doubling
        def tau_with(samples):
            t = np.linspace(0.0, 10.0, samples)
            w = Worldline(t, 0.05 * np.sin(t / 3.0), np.zeros_like(t), 1.0)
            return dilation_profile(w).tau_total

        fine = tau_with(20001)
        coarse = abs(tau_with(51) - fine)
        finer = abs(tau_with(101) - fine)
        assert finer < coarse / 3.0
        # trapezoid bound: |err| <= (b - a) h^2 max|alpha''| / 12 ~ 1.9e-4 at h = 0.2
        assert coarse < 1.9e-4

    def test_weak_field_guard(self):
        t = np.linspace(0.0, 1.0, 5)
        w = Worldline(t, np.full_like(t, 0.6), np.zeros_like(t), 1.0)
        with pytest.raises(WeakFieldViolationError):
            dilation_profile(w, StaticSpacetime(c=1.0))

    def test_gravitational_only_drops_kinetic_term(self):
        w = uniform_gravity_worldline(0.02, 10.0, samples=11, p=0.5)
        prof = dilation_profile(w, gravitational_only=True)
        np.testing.assert_allclose(prof.alpha, 1.0 + w.phi, atol=1e-15)

    def test_profile_validation(self):
        with pytest.raises(WeakFieldViolationError):
            DilationProfile([0.0, 1.0], [1.0, -0.1], [0.0, 0.5])
        with pytest.raises(ValueError, match="tau"):
            DilationProfile([0.0, 1.0], [1.0, 1.0], [0.5, 1.0])

    def test_interpolators(self):
        w = uniform_gravity_worldline(0.1, 2.0, samples=2001)
        prof = dilation_profile(w)
        assert prof.alpha_at(1.0) == pytest.approx(1.1, abs=1e-12)
        # tau(1) = 1 + 0.1/2 = 1.05 for the linear ramp
        assert prof.tau_at(1.0) == pytest.approx(1.05, abs=1e-9)
