import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ubb84 import states
from ubb84.checks import run_state_checks

kappas = st.floats(1e-3, 1.0)

E_IPI4 = np.exp(1j * np.pi / 4)


def assert_same_up_to_phase(u, v, tol=1e-12):
    residual, _ = states.phase_align(u, v)
    assert residual < tol


class TestAliceSinglePhoton:
    def test_balanced_is_plus_state(self):
        got = states.alice_single_photon(0, "X", 1.0)
        np.testing.assert_allclose(got, [1, 1] / np.sqrt(2), atol=1e-15)

    def test_x_basis_quarter_transmittance(self):
        got = states.alice_single_photon(1, "X", 0.25)
        want = np.array([1.0, -0.5]) / np.sqrt(1.25)
        np.testing.assert_allclose(got, want, atol=1e-15)

    def test_y_basis_quarter_transmittance(self):
        got = states.alice_single_photon(0, "Y", 0.25)
        want = np.array([E_IPI4.conj(), 0.5 * E_IPI4]) / np.sqrt(1.25)
        np.testing.assert_allclose(got, want, atol=1e-15)

    @pytest.mark.parametrize("kappa", [0.0, -0.1, 1.0001])
    def test_rejects_bad_kappa(self, kappa):
        with pytest.raises(ValueError):
            states.alice_single_photon(0, "X", kappa)

    def test_rejects_bad_bit_and_basis(self):
        with pytest.raises(ValueError):
            states.alice_single_photon(2, "X", 0.5)
        with pytest.raises(ValueError):
            states.alice_single_photon(0, "Z", 0.5)

    @given(kappas, st.sampled_from(["X", "Y"]), st.sampled_from([0, 1]))
    def test_normalized(self, kappa, basis, a):
        vec = states.alice_single_photon(a, basis, kappa)
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-12


class TestVirtualJointState:
    def test_balanced_is_triplet_bell(self):
        got = states.virtual_joint_state("X", 1.0)
        want = np.array([0, 1, 1, 0]) / np.sqrt(2)
        assert_same_up_to_phase(want, got)

    def test_half_transmittance_amplitudes(self):
        # symbolic expansion: (sqrt(kappa)|01> + |10>)/sqrt(1+kappa)
        got = states.virtual_joint_state("X", 0.5)
        want = np.array([0, 1, np.sqrt(2), 0]) / np.sqrt(3)
        assert_same_up_to_phase(want, got)

    @given(kappas)
    @settings(max_examples=100)
    def test_basis_independent(self, kappa):
        x_state = states.virtual_joint_state("X", kappa)
        y_state = states.virtual_joint_state("Y", kappa)
        assert_same_up_to_phase(x_state, y_state)

    @given(kappas)
    def test_normalized(self, kappa):
        vec = states.virtual_joint_state("Y", kappa)
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-12


class TestAliceFilter:
    def test_identity_at_unit_kappa(self):
        np.testing.assert_allclose(states.alice_filter(1.0), np.eye(2), atol=0)

    def test_quarter_kappa_diagonal(self):
        np.testing.assert_allclose(
            states.alice_filter(0.25), np.diag([0.5, 1.0]), atol=1e-15
        )

    def test_action_on_plus_state(self):
        out = states.alice_filter(0.25) @ states.qubit_state(0, "X")
        want = np.array([0.5, 1.0])
        assert_same_up_to_phase(want / np.linalg.norm(want), out / np.linalg.norm(out))

    @given(kappas)
    def test_singular_values_at_most_one(self, kappa):
        sv = np.linalg.svd(states.alice_filter(kappa), compute_uv=False)
        assert sv.max() <= 1.0 + 1e-15


class TestFilteredBellState:
    def test_unit_kappa_passes_through(self):
        state, success = states.filtered_bell_state(1.0)
        np.testing.assert_allclose(state, np.array([0, 1, 1, 0]) / np.sqrt(2),
                                   atol=1e-15)
        assert success == pytest.approx(1.0, abs=1e-15)

    def test_matches_virtual_state(self):
        state, _ = states.filtered_bell_state(0.5)
        assert_same_up_to_phase(states.virtual_joint_state("X", 0.5), state)

    def test_success_probability(self):
        _, success = states.filtered_bell_state(0.25)
        assert success == pytest.approx(0.625, abs=1e-15)

    @given(kappas)
    @settings(max_examples=100)
    def test_proportionality_and_success(self, kappa):
        state, success = states.filtered_bell_state(kappa)
        assert_same_up_to_phase(states.virtual_joint_state("X", kappa), state)
        assert success == pytest.approx((1.0 + kappa) / 2.0, abs=1e-12)


class TestFockDecomposition:
    def test_vacuum_and_single_photon_weights(self):
        dec = states.fock_decompose(0.3, 0.5, 0.0)
        mu = 1.5 * 0.3
        assert dec.probs[0] == pytest.approx(math.exp(-mu), rel=1e-12)
        assert dec.probs[1] == pytest.approx(math.exp(-mu) * mu, rel=1e-12)

    def test_single_photon_state_matches_source(self):
        dec = states.fock_decompose(0.3, 0.5, np.pi)
        fid = states.fidelity(
            dec.conditional_states[1], states.alice_single_photon(1, "X", 0.5)
        )
        assert fid >= 1.0 - 1e-12

    @given(st.floats(0.05, 1.0), kappas)
    @settings(max_examples=50)
    def test_poisson_weights(self, alpha, kappa):
        dec = states.fock_decompose(alpha, kappa, np.pi / 2.0)
        mu = (1.0 + kappa) * alpha
        for n in range(6):
            poisson = math.exp(-mu) * mu**n / math.factorial(n)
            assert abs(dec.probs[n] - poisson) < 1e-10

    @given(st.floats(0.05, 1.0), kappas)
    @settings(max_examples=50)
    def test_weight_deficit_is_poisson_tail(self, alpha, kappa):
        dec = states.fock_decompose(alpha, kappa, 0.0)
        mu = (1.0 + kappa) * alpha
        tail = 1.0 - math.fsum(
            math.exp(-mu) * mu**n / math.factorial(n) for n in range(21)
        )
        deficit = 1.0 - dec.probs.sum()
        assert deficit <= tail + 1e-12
        assert (dec.probs >= 0.0).all()
        for state in dec.conditional_states:
            assert abs(np.linalg.norm(state) - 1.0) < 1e-12

    def test_cutoff_too_small_raises(self):
        with pytest.raises(ValueError, match="tail"):
            states.fock_decompose(1.0, 1.0, 0.0, cutoff=4)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            states.fock_decompose(0.0, 0.5, 0.0)
        with pytest.raises(ValueError):
            states.fock_decompose(0.3, 0.5, 0.0, cutoff=1)

    @given(st.floats(0.05, 1.0), kappas,
           st.sampled_from([0.0, np.pi / 2, np.pi, 3 * np.pi / 2]))
    @settings(max_examples=20, deadline=None)
    def test_matches_explicit_phase_average(self, alpha, kappa, theta):
        dec = states.fock_decompose(alpha, kappa, theta, cutoff=6, tail_tol=None)
        direct = states.decomposition_density(dec)
        averaged = states.phase_average_density(alpha, kappa, theta, cutoff=6)
        assert states.trace_distance(direct, averaged) < 1e-9


class TestBobPovm:
    @given(st.floats(0.0, 2 * np.pi), kappas, st.floats(1e-3, 1.0))
    @settings(max_examples=100)
    def test_valid_povm(self, phi, kappa, eta):
        elements = states.bob_povm(phi, kappa, eta)
        total = np.zeros((2, 2), dtype=complex)
        for el in elements:
            assert np.abs(el - el.conj().T).max() < 1e-10
            assert np.linalg.eigvalsh(el).min() >= -1e-10
            total += el
        assert np.abs(total - np.eye(2)).max() < 1e-10

    @given(kappas, st.floats(1e-3, 1.0))
    @settings(max_examples=100)
    def test_failure_element_basis_independent(self, kappa, eta):
        fail_x = states.bob_povm(0.0, kappa, eta)[2]
        fail_y = states.bob_povm(np.pi / 2.0, kappa, eta)[2]
        assert np.abs(fail_x - fail_y).max() < 1e-12

    @given(kappas, st.floats(1e-3, 1.0), st.sampled_from([0, 1]))
    @settings(max_examples=100)
    def test_matched_basis_reach_probability(self, kappa, eta, a):
        psi = states.alice_single_photon(a, "X", kappa)
        f0, f1, _ = states.bob_povm(0.0, kappa, eta)
        got = np.vdot(psi, (f0 + f1) @ psi).real
        assert got == pytest.approx(eta * kappa / (1.0 + kappa), abs=1e-12)

    def test_lossless_balanced_failure_is_half_identity(self):
        _, _, fail = states.bob_povm(0.3, 1.0, 1.0)
        np.testing.assert_allclose(fail, np.eye(2) / 2.0, atol=1e-15)

    def test_correct_detector_takes_all_clicks(self):
        psi = states.alice_single_photon(1, "X", 0.7)
        f0, f1, _ = states.bob_povm(0.0, 0.7, 0.9)
        assert np.vdot(psi, f0 @ psi).real == pytest.approx(0.0, abs=1e-15)
        assert np.vdot(psi, f1 @ psi).real == pytest.approx(
            0.9 * 0.7 / 1.7, abs=1e-12
        )


class TestChannelErrorEquality:
    @given(st.integers(0, 2**32 - 1), kappas)
    @settings(max_examples=50)
    def test_kraus_set_is_trace_preserving(self, seed, kappa):
        kraus = states.random_kraus_set(np.random.default_rng(seed))
        total = sum(op.conj().T @ op for op in kraus)
        assert np.abs(total - np.eye(2)).max() < 1e-12

    @given(st.integers(0, 2**32 - 1), kappas)
    @settings(max_examples=50)
    def test_prepared_basis_does_not_change_conjugate_error(self, seed, kappa):
        kraus = states.random_kraus_set(np.random.default_rng(seed))
        errs = []
        for basis in ("X", "Y"):
            psi = states.virtual_joint_state(basis, kappa)
            rho = states.apply_channel_to_bob(np.outer(psi, psi.conj()), kraus)
            errs.append(states.conjugate_basis_error(rho))
        assert errs[0] == pytest.approx(errs[1], abs=1e-12)


class TestPhaseAlign:
    @given(kappas, st.floats(-np.pi, np.pi))
    def test_reports_injected_phase(self, kappa, chi):
        vec = states.virtual_joint_state("X", kappa)
        residual, got_chi = states.phase_align(vec, np.exp(-1j * chi) * vec)
        assert residual < 1e-12
        assert math.cos(got_chi - chi) == pytest.approx(1.0, abs=1e-9)


class TestCheckBattery:
    def test_all_properties_pass(self):
        results = run_state_checks(seed=7)
        assert all(r.passed for r in results), [
            (r.name, r.residual) for r in results if not r.passed
        ]
        names = {r.name for r in results}
        assert "virtual_state_basis_independence" in names
        assert "phase_average_equivalence" in names

    def test_deterministic_under_fixed_seed(self):
        a = run_state_checks(seed=123)
        b = run_state_checks(seed=123)
        assert [(r.name, r.residual) for r in a] == [(r.name, r.residual) for r in b]

    def test_fault_injection_fails_named_property(self):
        results = run_state_checks(seed=7, fault_kappa_shift=1e-4)
        failed = [r.name for r in results if not r.passed]
        assert failed == ["virtual_state_basis_independence"]
