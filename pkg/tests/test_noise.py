# test_noise.py - Local noise channels and the noisy Trotter circuit
import numpy as np
import pytest
import scipy.linalg as la

from shared.utils.errors import ConfigError, SizeLimitError
from services.simulation_service.hamiltonians import build_tfi, group_matrix
from services.simulation_service.metrics import relative_entropy_to_mixed
from services.simulation_service.models import GroupedHamiltonian, NoiseSpec, PauliString, Placement
from services.simulation_service.noise import (
    adjoint_channel, adjoint_step_noise, amplitude_damping_kraus, apply_amplitude_damping,
    apply_kraus_to_matrix, apply_noise, apply_pauli_channel, apply_step_noise,
    diamond_distance_pauli, is_unital, iter_noisy_circuit, pauli_kraus, run_noisy_circuit,
)
from services.simulation_service.numeric_core import (
    basis_state, maximally_mixed, random_density_matrix, trace_norm,
)
from services.simulation_service.trotter import ProductFormula, build_schedule


def kraus_completeness(kraus_ops):
    return sum(K.conj().T @ K for K in kraus_ops)


class TestKraus:
    def test_pauli_kraus_is_trace_preserving(self):
        np.testing.assert_allclose(kraus_completeness(pauli_kraus(0.1, 0.05, 0.2)), np.eye(2), atol=1e-14)

    def test_amplitude_damping_kraus_is_trace_preserving(self):
        np.testing.assert_allclose(kraus_completeness(amplitude_damping_kraus(0.3)), np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("rates", [(-0.1, 0, 0), (0.5, 0.4, 0.3)])
    def test_invalid_pauli_rates(self, rates):
        with pytest.raises(ConfigError):
            pauli_kraus(*rates)

    def test_invalid_damping_rate(self):
        with pytest.raises(ConfigError):
            amplitude_damping_kraus(1.5)


class TestChannels:
    def test_zero_rates_leave_state_unchanged(self):
        rho = random_density_matrix(3, seed=2)
        np.testing.assert_allclose(apply_pauli_channel(rho, 0, 0, 0).matrix, rho.matrix, atol=1e-15)

    def test_maximally_mixed_is_a_fixed_point(self):
        rho = maximally_mixed(3)
        out = apply_noise(rho, NoiseSpec.depolarizing(0.2))
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-15)

    def test_depolarizing_on_basis_state(self):
        gamma = 0.03
        out = apply_noise(basis_state("0"), NoiseSpec.depolarizing(gamma))
        np.testing.assert_allclose(np.diag(out.matrix).real, [1 - 2 * gamma / 3, 2 * gamma / 3], atol=1e-15)
        assert trace_norm(out.matrix - basis_state("0").matrix) == pytest.approx(4 * gamma / 3)

    def test_amplitude_damping_populations(self):
        g = 0.2
        np.testing.assert_allclose(apply_amplitude_damping(basis_state("0"), g).matrix, np.diag([1, 0]), atol=1e-15)
        np.testing.assert_allclose(apply_amplitude_damping(basis_state("1"), g).matrix, np.diag([g, 1 - g]), atol=1e-15)
        np.testing.assert_allclose(
            apply_amplitude_damping(maximally_mixed(1), g).matrix, np.diag([(1 + g) / 2, (1 - g) / 2]), atol=1e-15
        )

    def test_single_qubit_action_matches_kronecker_oracle(self):
        rho = random_density_matrix(2, seed=4)
        kraus_ops = pauli_kraus(0.1, 0.0, 0.2)
        expected = sum(np.kron(np.eye(2), K) @ rho.matrix @ np.kron(np.eye(2), K).conj().T for K in kraus_ops)
        np.testing.assert_allclose(apply_kraus_to_matrix(rho.matrix, 2, kraus_ops, [1]), expected, atol=1e-14)

    def test_all_qubit_action_matches_kronecker_oracle(self):
        rho = random_density_matrix(2, seed=5)
        kraus_ops = amplitude_damping_kraus(0.25)
        expected = sum(
            np.kron(A, B) @ rho.matrix @ np.kron(A, B).conj().T for A in kraus_ops for B in kraus_ops
        )
        np.testing.assert_allclose(apply_kraus_to_matrix(rho.matrix, 2, kraus_ops, [0, 1]), expected, atol=1e-14)

    def test_per_layer_rates_apply_repeatedly(self):
        spec = NoiseSpec.depolarizing(0.05, placement=Placement.PER_LAYER)
        rates = spec.layer_rates(4, 0.1)
        assert rates == [0.05] * 4
        rho = basis_state("01")
        repeated = rho
        for _ in range(4):
            repeated = apply_noise(repeated, spec)
        np.testing.assert_allclose(apply_step_noise(rho, spec, rates).matrix, repeated.matrix, atol=1e-15)

    def test_per_time_rate_scales_with_step(self):
        spec = NoiseSpec.depolarizing(0.0, placement=Placement.PER_TIME, time_rate=0.2)
        assert spec.layer_rates(4, 0.5) == [pytest.approx(0.1)]

    def test_per_time_requires_rate(self):
        with pytest.raises(ValueError):
            NoiseSpec.depolarizing(0.1, placement=Placement.PER_TIME)

    def test_unitality(self):
        assert is_unital(NoiseSpec.dephasing(0.1))
        assert not is_unital(NoiseSpec.amplitude_damping(0.1))
        out = apply_noise(maximally_mixed(2), NoiseSpec.amplitude_damping(0.1))
        assert not np.allclose(out.matrix, maximally_mixed(2).matrix)


class TestAdjoint:
    def test_depolarizing_is_self_adjoint(self):
        O = random_density_matrix(2, seed=8).matrix
        spec = NoiseSpec.depolarizing(0.1)
        forward = apply_kraus_to_matrix(O, 2, pauli_kraus(*spec.pauli_rates()), [0, 1])
        np.testing.assert_allclose(adjoint_channel(O, spec), forward, atol=1e-14)

    def test_zero_rate_is_identity(self):
        O = random_density_matrix(2, seed=9).matrix
        np.testing.assert_allclose(adjoint_channel(O, NoiseSpec.depolarizing(0.0)), O, atol=1e-15)

    @pytest.mark.parametrize("spec", [NoiseSpec.amplitude_damping(0.3), NoiseSpec.pauli(0.05, 0.1, 0.02)])
    def test_duality(self, spec):
        rho = random_density_matrix(2, seed=10)
        O = random_density_matrix(2, seed=11).matrix - 0.3 * np.eye(4)
        rates = [spec.gamma, spec.gamma / 2]
        forward = apply_step_noise(rho, spec, rates).matrix
        backward = adjoint_step_noise(O, spec, rates)
        assert np.trace(O @ forward) == pytest.approx(np.trace(backward @ rho.matrix), abs=1e-12)


class TestDiamondDistance:
    def test_identical_channels(self):
        spec = NoiseSpec.pauli(0.01, 0.02, 0.03)
        assert diamond_distance_pauli(spec, spec, 3) == 0.0

    def test_single_qubit_against_identity(self):
        assert diamond_distance_pauli(NoiseSpec.depolarizing(0.04), NoiseSpec.depolarizing(0.0), 1) == pytest.approx(0.08)

    @pytest.mark.parametrize("n", [1, 3, 8])
    def test_product_channel_against_identity(self, n):
        gamma = 0.01
        distance = diamond_distance_pauli(NoiseSpec.depolarizing(gamma), NoiseSpec.depolarizing(0.0), n)
        assert distance == pytest.approx(2 * (1 - (1 - gamma) ** n))
        assert distance <= 2 * n * gamma

    def test_general_pair_matches_enumeration(self):
        first, second = NoiseSpec.pauli(0.01, 0.02, 0.03), NoiseSpec.pauli(0.03, 0.0, 0.01)
        q = np.array([0.94, 0.01, 0.02, 0.03])
        r = np.array([0.96, 0.03, 0.0, 0.01])
        expected = np.sum(np.abs(np.kron(q, q) - np.kron(r, r)))
        assert diamond_distance_pauli(first, second, 2) == pytest.approx(expected)

    def test_rejects_amplitude_damping(self):
        with pytest.raises(ConfigError):
            diamond_distance_pauli(NoiseSpec.amplitude_damping(0.1), NoiseSpec.depolarizing(0.1), 2)


class TestNoisyCircuit:
    def test_noiseless_run_matches_trotter_power(self, tfi2):
        schedule = build_schedule(2, 2)
        r, t = 5, 1.0
        rho0 = basis_state("00")
        trajectory = run_noisy_circuit(tfi2, schedule, r, t, NoiseSpec.depolarizing(0.0), rho0)
        PF = np.linalg.matrix_power(ProductFormula(tfi2, schedule).step_unitary(t / r), r)
        np.testing.assert_allclose(trajectory.final_state.matrix, PF @ rho0.matrix @ PF.conj().T, atol=1e-12)
        assert len(trajectory.states) == r + 1

    def test_trivial_hamiltonian_applies_noise_once(self):
        H = GroupedHamiltonian(n_qubits=1, groups=[[]])
        spec = NoiseSpec.depolarizing(0.1)
        trajectory = run_noisy_circuit(H, build_schedule(1, 1), 1, 1.0, spec, basis_state("0"))
        np.testing.assert_allclose(
            trajectory.final_state.matrix, apply_noise(basis_state("0"), spec).matrix, atol=1e-15
        )

    def test_matches_hand_composition(self, tfi2):
        gamma, r, t = 0.01, 3, 0.6
        dt = t / r
        PF = la.expm(-1j * dt * group_matrix(tfi2, 0)) @ la.expm(-1j * dt * group_matrix(tfi2, 1))
        kraus_ops = pauli_kraus(gamma / 3, gamma / 3, gamma / 3)
        two_qubit = [np.kron(A, B) for A in kraus_ops for B in kraus_ops]
        rho = basis_state("00").matrix
        for _ in range(r):
            rho = PF @ rho @ PF.conj().T
            rho = sum(K @ rho @ K.conj().T for K in two_qubit)
        trajectory = run_noisy_circuit(tfi2, build_schedule(1, 2), r, t, NoiseSpec.depolarizing(gamma), basis_state("00"))
        np.testing.assert_allclose(trajectory.final_state.matrix, rho, atol=1e-12)

    def test_states_stay_valid(self, tfi3):
        spec = NoiseSpec.amplitude_damping(0.05)
        for step in iter_noisy_circuit(tfi3, build_schedule(2, 2), 10, 2.0, spec, basis_state("101")):
            assert np.trace(step.after.matrix).real == pytest.approx(1.0, abs=1e-12)
            assert step.after.is_valid()

    def test_relative_entropy_contracts(self, tfi3):
        gamma = 0.05
        rho0 = basis_state("000")
        initial = relative_entropy_to_mixed(rho0)
        steps = iter_noisy_circuit(tfi3, build_schedule(2, 2), 10, 2.0, NoiseSpec.depolarizing(gamma), rho0)
        for step in steps:
            assert relative_entropy_to_mixed(step.after) <= (1 - gamma) ** step.step * initial + 1e-9

    def test_streaming_drops_intermediate_states(self, tfi2):
        trajectory = run_noisy_circuit(
            tfi2, build_schedule(1, 2), 4, 1.0, NoiseSpec.depolarizing(0.01), basis_state("00"), retain_states=False
        )
        assert trajectory.states is None
        assert trajectory.config.steps == 4

    @pytest.mark.parametrize("r, t", [(0, 1.0), (3, 0.0), (3, -1.0)])
    def test_invalid_steps_or_time(self, tfi2, r, t):
        with pytest.raises(ConfigError):
            run_noisy_circuit(tfi2, build_schedule(1, 2), r, t, NoiseSpec.depolarizing(0.01), basis_state("00"))

    def test_size_limit_checked_first(self):
        H = build_tfi(13, 1.0, 1.0)
        with pytest.raises(SizeLimitError):
            run_noisy_circuit(H, build_schedule(1, 2), 2, 1.0, NoiseSpec.depolarizing(0.01), basis_state("0"))

    def test_state_size_mismatch(self, tfi2):
        with pytest.raises(ConfigError):
            run_noisy_circuit(tfi2, build_schedule(1, 2), 2, 1.0, NoiseSpec.depolarizing(0.01), basis_state("000"))

    def test_per_time_rate_above_one(self, tfi2):
        spec = NoiseSpec.depolarizing(0.0, placement=Placement.PER_TIME, time_rate=5.0)
        with pytest.raises(ConfigError):
            run_noisy_circuit(tfi2, build_schedule(1, 2), 1, 1.0, spec, basis_state("00"))
