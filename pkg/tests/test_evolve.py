import numpy as np
import pytest
from scipy.linalg import expm

from uddsim.algebra import (
    PAULIS,
    basis_state,
    bell_plus_state,
    polarization_from_state,
    up_up_state,
)
from uddsim.evolve import (
    StepPolicy,
    TimeSeries,
    avg_distance,
    coherence_expectation,
    delta_propagator,
    evolve_delta,
    evolve_gaussian,
    gaussian_propagator,
)
from uddsim.linalg import kron, kron_all, norm
from uddsim.models import (
    ModelInstance,
    build_two_qubit_spin_bath,
    initial_full_state,
    control_operator,
)
from uddsim.pulses import PulseShape, udd_times

from conftest import random_density, random_state


def toy_model(h_total, factor_dims, system_factor_count):
    return ModelInstance(
        h_total=np.asarray(h_total, dtype=complex),
        factor_dims=tuple(factor_dims),
        system_factor_count=system_factor_count,
        seed=0,
        coefficient_log=(),
    )


def oracle_delta_propagator(h, p_full, times, total_time):
    """scipy-expm product oracle for the instantaneous-pulse evolution."""
    bounds = np.concatenate([[0.0], times, [total_time]])
    u = np.eye(h.shape[0], dtype=complex)
    for j in range(len(bounds) - 1):
        u = expm(-1j * h * (bounds[j + 1] - bounds[j])) @ u
        if j < len(bounds) - 2:
            u = expm(-1j * (np.pi / 2) * p_full) @ u
    return u


@pytest.fixture(scope="module")
def seed42():
    model = build_two_qubit_spin_bath(42)
    p = polarization_from_state(up_up_state())
    psi0 = initial_full_state(model, up_up_state())
    return model, p, psi0


class TestEvolveDelta:
    def test_no_dynamics(self):
        model = toy_model(np.zeros((8, 8)), (2, 2, 2), 2)
        p = polarization_from_state(bell_plus_state())
        psi0 = initial_full_state(model, bell_plus_state())
        s = evolve_delta(model, p, udd_times(0, 1.0), psi0, 50)
        assert np.allclose(s.f_values, s.f_values[0])

    def test_eigenstate_starts_at_one(self, seed42):
        model, p, psi0 = seed42
        s = evolve_delta(model, p, udd_times(2, 0.1), psi0, 10)
        assert s.f_values[0] == pytest.approx(1.0, abs=1e-12)

    def test_mixed_bath_density_input(self, seed42, rng):
        model, p, _ = seed42
        rho_sys = np.outer(up_up_state(), up_up_state().conj())
        rho0 = kron(rho_sys, random_density(rng, 8))
        s = evolve_delta(model, p, udd_times(1, 0.1), rho0, 10)
        assert s.f_values[0] == pytest.approx(1.0, abs=1e-10)

    def test_commuting_free_hamiltonian_locks_f(self):
        # diagonal h commutes with the diagonal polarization: F frozen exactly
        h = kron_all([np.diag([0.3, -0.7]), np.diag([1.1, 0.2]), np.diag([0.5, -0.5])])
        model = toy_model(h, (2, 2, 2), 2)
        p = polarization_from_state(up_up_state())
        psi = (basis_state(4, 0) + basis_state(4, 3)) / np.sqrt(2)
        psi0 = initial_full_state(model, psi)
        s = evolve_delta(model, p, udd_times(1, 0.8), psi0, 30)
        assert np.max(np.abs(s.f_values - s.f_values[0])) < 1e-12

    def test_matches_scipy_oracle(self, seed42):
        model, p, psi0 = seed42
        sched = udd_times(3, 0.1)
        p_full = kron(p.op, np.eye(8))
        u_oracle = oracle_delta_propagator(model.h_total, p_full, sched.times, 0.1)
        s = evolve_delta(model, p, sched, psi0, 7)
        assert np.max(np.abs(s.final_propagator - u_oracle)) < 1e-12
        f_oracle = np.real(np.vdot(u_oracle @ psi0, p_full @ (u_oracle @ psi0)))
        assert s.f_values[-1] == pytest.approx(f_oracle, abs=1e-12)

    def test_sample_times_and_reduced_states(self, seed42):
        model, p, psi0 = seed42
        s = evolve_delta(model, p, udd_times(2, 0.1), psi0, 11, keep_reduced=True)
        assert np.allclose(s.times, np.linspace(0, 0.1, 11))
        assert s.reduced_states.shape == (11, 4, 4)
        for r in s.reduced_states:
            assert abs(np.trace(r) - 1.0) < 1e-10
            assert np.max(np.abs(r - r.conj().T)) < 1e-10
            assert np.linalg.eigvalsh(r).min() > -1e-10

    def test_propagator_unitarity(self, seed42):
        model, p, psi0 = seed42
        s = evolve_delta(model, p, udd_times(8, 0.1), psi0, 5)
        u = s.final_propagator
        assert np.linalg.norm(u.conj().T @ u - np.eye(32)) < 1e-8

    def test_scaling_law(self, seed42):
        model, p, psi0 = seed42
        t_grid = np.array([0.0125, 0.025, 0.05, 0.1])
        for n in (1, 2, 3):
            devs = []
            for t in t_grid:
                s = evolve_delta(model, p, udd_times(n, float(t)), psi0, 2)
                devs.append(1.0 - s.f_values[-1])
            slope = np.polyfit(np.log(t_grid), np.log(devs), 1)[0]
            assert slope >= n + 0.7

    def test_plain_control_operator(self, seed42):
        model, p, psi0 = seed42
        ctrl = control_operator("single_intuitive", (2, 2))
        sched = udd_times(2, 0.1)
        s = evolve_delta(model, p, sched, psi0, 5, control=ctrl)
        # oracle: pulse unitary exp(-i pi/2 (sz1+sz2)) = -sz x sz on the system
        u_pulse = expm(-1j * (np.pi / 2) * kron(ctrl, np.eye(8)))
        want = -kron_all([PAULIS["z"], PAULIS["z"], np.eye(8)])
        assert np.max(np.abs(u_pulse - want)) < 1e-12
        bounds = np.concatenate([[0.0], sched.times, [0.1]])
        u = np.eye(32, dtype=complex)
        for j in range(3):
            u = expm(-1j * model.h_total * (bounds[j + 1] - bounds[j])) @ u
            if j < 2:
                u = u_pulse @ u
        assert np.max(np.abs(s.final_propagator - u)) < 1e-12


class TestEvolveGaussian:
    def test_single_pulse_zero_hamiltonian(self):
        model = toy_model(np.zeros((8, 8)), (2, 2, 2), 2)
        p = polarization_from_state(up_up_state())
        u = gaussian_propagator(model, p, udd_times(1, 1.0), PulseShape("gaussian", c=0.01))
        want = -1j * kron(p.op, np.eye(2))
        assert norm(u - want, "spectral") < 1e-6

    def test_convergence_to_delta(self, seed42):
        model, p, _ = seed42
        sched = udd_times(4, 0.1)
        u_delta = delta_propagator(model, p, sched)
        devs = [
            norm(gaussian_propagator(model, p, sched,
                                     PulseShape("gaussian", c=0.1 / ratio)) - u_delta,
                 "spectral")
            for ratio in (25, 50, 100, 200)
        ]
        assert all(a > b for a, b in zip(devs, devs[1:]))

    def test_final_f_consistent_with_delta(self, seed42):
        model, p, psi0 = seed42
        for n in (1, 2):
            sched = udd_times(n, 0.1)
            sd = evolve_delta(model, p, sched, psi0, 50)
            sg = evolve_gaussian(model, p, sched, PulseShape("gaussian", c=0.1 / 1e4),
                                 psi0, 50)
            assert abs(sd.f_values[-1] - sg.f_values[-1]) < 1e-4

    def test_continuity(self, seed42):
        model, p, psi0 = seed42
        s = evolve_gaussian(model, p, udd_times(8, 0.1), PulseShape("gaussian", c=0.001),
                            psi0, 1000)
        assert np.max(np.abs(np.diff(s.f_values))) <= 0.05

    def test_propagator_unitarity(self, seed42):
        model, p, psi0 = seed42
        s = evolve_gaussian(model, p, udd_times(4, 0.1), PulseShape("gaussian", c=0.001),
                            psi0, 100)
        u = s.final_propagator
        assert np.linalg.norm(u.conj().T @ u - np.eye(32)) < 1e-6

    def test_uncontrolled_matches_delta_exactly(self, seed42):
        model, p, psi0 = seed42
        sd = evolve_delta(model, p, udd_times(0, 0.1), psi0, 20)
        sg = evolve_gaussian(model, p, udd_times(0, 0.1), PulseShape("gaussian", c=0.001),
                             psi0, 20)
        assert np.max(np.abs(sd.f_values - sg.f_values)) < 1e-10

    def test_step_policy_validation(self, seed42):
        model, p, psi0 = seed42
        with pytest.raises(ValueError):
            evolve_gaussian(model, p, udd_times(2, 0.1), PulseShape("gaussian", c=0.001),
                            psi0, 10, StepPolicy(fine_step_fraction=20.0))
        with pytest.raises(ValueError):
            StepPolicy(coarse_steps=0)

    def test_rejects_delta_shape(self, seed42):
        model, p, psi0 = seed42
        with pytest.raises(ValueError):
            evolve_gaussian(model, p, udd_times(1, 0.1), PulseShape("delta"), psi0, 10)


class TestCoherenceExpectation:
    def test_eigenstate(self, rng):
        psi = random_state(rng, 4)
        p = polarization_from_state(psi)
        rho = kron(np.outer(psi, psi.conj()), random_density(rng, 3))
        assert coherence_expectation(rho, p) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_state(self, rng):
        psi = basis_state(4, 0)
        p = polarization_from_state(psi)
        perp = basis_state(4, 2)
        rho = kron(np.outer(perp, perp.conj()), random_density(rng, 3))
        assert coherence_expectation(rho, p) == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_maximally_mixed(self, m, rng):
        p = polarization_from_state(basis_state(m, 0))
        rho = np.eye(2 * m) / (2 * m)
        assert coherence_expectation(rho, p) == pytest.approx((2 - m) / m, abs=1e-12)

    def test_dimension_mismatch(self):
        p = polarization_from_state(basis_state(4, 0))
        with pytest.raises(ValueError):
            coherence_expectation(np.eye(6) / 6, p)


class TestAvgDistance:
    def test_locked_state_scores_zero(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        series = TimeSeries(np.linspace(0, 1, 5), np.ones(5),
                            np.stack([rho] * 5))
        assert avg_distance(series, rho, 1.0) == 0.0

    def test_orthogonal_pure_states_score_one(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        perp = np.diag([0.0, 1.0]).astype(complex)
        series = TimeSeries(np.linspace(0, 1, 5), np.ones(5),
                            np.stack([perp] * 5))
        assert avg_distance(series, rho, 1.0) == pytest.approx(1.0)

    def test_requires_reduced_states(self):
        series = TimeSeries(np.linspace(0, 1, 5), np.ones(5))
        with pytest.raises(ValueError):
            avg_distance(series, np.eye(2) / 2, 1.0)

    def test_dbar_non_increasing_in_pulse_count(self):
        model = build_two_qubit_spin_bath(42)
        p = polarization_from_state(bell_plus_state())
        psi0 = initial_full_state(model, bell_plus_state())
        rho_ref = np.outer(bell_plus_state(), bell_plus_state().conj())
        dbars = []
        for n in range(1, 9):
            s = evolve_delta(model, p, udd_times(n, 0.1), psi0, 400, keep_reduced=True)
            dbars.append(avg_distance(s, rho_ref, 0.1))
        assert all(a >= b for a, b in zip(dbars, dbars[1:]))


class TestTimeSeriesValidation:
    def test_rejects_unsorted_times(self):
        with pytest.raises(ValueError):
            TimeSeries(np.array([0.0, 0.5, 0.4]), np.zeros(3))

    def test_rejects_out_of_range_f(self):
        with pytest.raises(ValueError):
            TimeSeries(np.array([0.0, 1.0]), np.array([0.0, 1.5]))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            TimeSeries(np.array([0.0, 1.0]), np.zeros(3))
