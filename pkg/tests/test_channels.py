import numpy as np
import pytest

from tauwork.channels import (
    PropagatorSchedule,
    QuantumChannel,
    amplitude_damping_channel,
    apply,
    depolarizing_channel,
    identity_channel,
    proper_time_propagator,
    time_ordered_propagator,
    unitality_deviation,
    unitary_channel,
)
from tauwork.operators import (
    DensityOperator,
    HermitianOperator,
    maximally_mixed,
    random_hermitian,
    random_unitary,
)
from tauwork.spacetime import dilation_profile, uniform_gravity_worldline

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def ramp_profile():
    return dilation_profile(uniform_gravity_worldline(0.02, 10.0, samples=2001))


class TestChannelConstruction:
    def test_trace_preservation_enforced(self):
        with pytest.raises(ValueError, match="trace preserving"):
            QuantumChannel([0.5 * np.eye(2)])

    def test_needs_at_least_one_kraus(self):
        with pytest.raises(ValueError, match="at least one"):
            QuantumChannel([])

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValueError, match="dimension"):
            QuantumChannel([np.eye(2), np.eye(3)])

    def test_unitary_channel_is_unital(self):
        ch = unitary_channel(np.eye(2))
        assert ch.is_unital
        u = proper_time_propagator(HermitianOperator(SIGMA_X), np.pi / 4)
        assert unitary_channel(u).is_unital

    def test_unitary_channel_rejects_non_unitary(self):
        with pytest.raises(ValueError, match="unitary"):
            unitary_channel([[1.0, 0.0], [0.0, 0.5]])

    def test_amplitude_damping_kraus_family(self):
        ch = amplitude_damping_channel(0.5)
        np.testing.assert_allclose(ch.kraus_ops[0], np.diag([1.0, np.sqrt(0.5)]))
        np.testing.assert_allclose(ch.kraus_ops[1], [[0.0, np.sqrt(0.5)], [0.0, 0.0]])
        assert not ch.is_unital

    def test_depolarizing_is_unital(self):
        for dim in (2, 3):
            assert depolarizing_channel(0.3, dim=dim).is_unital


class TestApply:
    def test_identity_channel_fixes_states(self):
        rho = maximally_mixed(3)
        out = apply(identity_channel(3), rho)
        assert np.max(np.abs(out.matrix - rho.matrix)) < 1e-15

    def test_amplitude_damping_on_maximally_mixed(self):
        out = apply(amplitude_damping_channel(0.5), maximally_mixed(2))
        np.testing.assert_allclose(out.matrix, np.diag([0.75, 0.25]), atol=1e-14)

    def test_unital_channel_fixes_maximally_mixed(self):
        ch = unitary_channel(random_unitary(4, 3))
        out = apply(ch, maximally_mixed(4))
        assert np.max(np.abs(out.matrix - np.eye(4) / 4)) < 1e-12

    def test_trace_and_positivity_preserved(self):
        rng = np.random.default_rng(12)
        ch = amplitude_damping_channel(0.3)
        for _ in range(10):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            m = a @ a.conj().T
            rho = DensityOperator(m / np.trace(m).real)
            out = apply(ch, rho)
            assert abs(np.trace(out.matrix).real - 1.0) < 1e-10
            assert np.linalg.eigvalsh(out.matrix)[0] > -1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            apply(identity_channel(2), maximally_mixed(3))


class TestUnitalityDeviation:
    def test_zero_for_unitary_channels(self):
        for dim in range(2, 9):
            ch = unitary_channel(random_unitary(dim, dim + 40))
            assert np.max(np.abs(unitality_deviation(ch))) < 1e-12

    def test_amplitude_damping_hand_value(self):
        g = unitality_deviation(amplitude_damping_channel(0.5))
        np.testing.assert_allclose(g, np.diag([0.25, -0.25]), atol=1e-14)

    def test_traceless_and_hermitian(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            dim = int(rng.integers(2, 5))
            n_k = int(rng.integers(1, 4))
            a = rng.normal(size=(dim * n_k, dim)) + 1j * rng.normal(size=(dim * n_k, dim))
            q, r = np.linalg.qr(a)
            q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
            ch = QuantumChannel([q[j * dim : (j + 1) * dim] for j in range(n_k)])
            g = unitality_deviation(ch)
            assert abs(np.trace(g)) < 1e-12
            assert np.max(np.abs(g - g.conj().T)) < 1e-15


class TestProperTimePropagator:
    def test_zero_time_is_identity(self):
        h = random_hermitian(3, 2)
        np.testing.assert_allclose(proper_time_propagator(h, 0.0), np.eye(3), atol=1e-15)

    def test_full_period_of_diagonal_system(self):
        h = HermitianOperator.diagonal([0.0, 1.0])
        u = proper_time_propagator(h, 2.0 * np.pi)
        np.testing.assert_allclose(u, np.eye(2), atol=1e-12)

    def test_composition(self):
        h = random_hermitian(4, 6)
        u = proper_time_propagator(h, 0.7) @ proper_time_propagator(h, 1.1)
        np.testing.assert_allclose(u, proper_time_propagator(h, 1.8), atol=1e-10)

    def test_unitarity(self):
        u = proper_time_propagator(random_hermitian(5, 9), 3.7)
        assert np.max(np.abs(u.conj().T @ u - np.eye(5))) < 1e-10


class TestPropagatorSchedule:
    def test_must_cover_total_proper_time(self):
        prof = ramp_profile()
        h = HermitianOperator(SIGMA_X)
        with pytest.raises(ValueError, match="covers proper time"):
            PropagatorSchedule([(prof.tau_total / 2, h)], prof, steps=10)

    def test_bounds_must_increase(self):
        prof = ramp_profile()
        h = HermitianOperator(SIGMA_X)
        with pytest.raises(ValueError, match="increasing"):
            PropagatorSchedule([(5.0, h), (5.0, h), (prof.tau_total, h)], prof, steps=10)

    def test_segment_lookup(self):
        prof = ramp_profile()
        h1 = HermitianOperator.diagonal([0.0, 1.0])
        h2 = HermitianOperator.diagonal([0.0, 2.0])
        sched = PropagatorSchedule([(5.0, h1), (prof.tau_total, h2)], prof, steps=10)
        assert sched.hamiltonian_at(4.9) is h1
        assert sched.hamiltonian_at(5.0) is h2
        assert sched.initial_hamiltonian() is h1
        assert sched.final_hamiltonian() is h2

    def test_steps_validation(self):
        prof = ramp_profile()
        with pytest.raises(ValueError, match="steps"):
            PropagatorSchedule.constant(HermitianOperator(SIGMA_X), prof, steps=0)


class TestTimeOrderedPropagator:
    def test_constant_schedule_matches_closed_form(self):
        prof = ramp_profile()
        h = random_hermitian(3, 14)
        exact = proper_time_propagator(h, prof.tau_total)
        for steps in (1, 3, 50):
            u = time_ordered_propagator(PropagatorSchedule.constant(h, prof, steps))
            assert np.max(np.abs(u - exact)) < 1e-10

    def test_commuting_family_closed_form(self):
        # H(tau) = f(tau) H0 with piecewise-constant f: overall phase is
        # exp(-i (integral of f dtau) H0)
        prof = ramp_profile()
        h0 = random_hermitian(2, 4)
        total = prof.tau_total
        cut = 0.4 * total
        sched = PropagatorSchedule(
            [(cut, HermitianOperator(h0.matrix)), (total, HermitianOperator(2.0 * h0.matrix))],
            prof,
            steps=4096,
        )
        effective = cut + 2.0 * (total - cut)
        exact = proper_time_propagator(h0, effective)
        assert np.max(np.abs(time_ordered_propagator(sched) - exact)) < 1e-3

    def test_unitary_at_every_step_count(self):
        prof = ramp_profile()
        h1 = HermitianOperator.diagonal([0.0, 1.0])
        h2 = HermitianOperator(SIGMA_X)
        total = prof.tau_total
        for steps in (1, 7, 64, 513):
            sched = PropagatorSchedule([(0.5 * total, h1), (total, h2)], prof, steps)
            u = time_ordered_propagator(sched)
            assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-9

    def test_step_halving_error_shrinks(self):
        # non-commuting two-segment drive, irrationally placed break
        prof = ramp_profile()
        total = prof.tau_total
        h1 = HermitianOperator(0.9 * np.diag([1.0, -1.0]).astype(complex) + 0.4 * SIGMA_X)
        h2 = HermitianOperator(h1.matrix + 0.5 * np.array([[0, -1j], [1j, 0]]))
        bounds = [total / np.sqrt(2.0), total]

        def u_at(steps):
            return time_ordered_propagator(
                PropagatorSchedule(list(zip(bounds, [h1, h2])), prof, steps)
            )

        u_ref = u_at(65536)
        errors = [np.max(np.abs(u_at(n) - u_ref)) for n in (64, 256, 1024)]
        assert errors[0] > errors[1] > errors[2]
        # straddling-step bound: ||H2 - H1|| * dtau_step ~ 5.4e-3 at 1024 steps
        assert errors[2] < 6e-3
