"""Property battery over the security algebra.

Each check sweeps randomized inputs from a seeded generator and records its
worst-case residual, so a run is reproducible and a failure names the
property that broke.  ``fault_kappa_shift`` deliberately desynchronizes the
unbalance used on the Y-basis route of the state-equality check; it exists
so fault injection can be tested end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ubb84 import states

__all__ = ["CheckResult", "run_state_checks"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        # numpy scalars leak in from comparisons; keep plain Python types
        self.passed = bool(self.passed)
        self.residual = float(self.residual)
        self.tolerance = float(self.tolerance)


def _random_kappas(rng: np.random.Generator, n: int) -> np.ndarray:
    # 1 - random() lies in (0, 1]
    return 1.0 - rng.random(n)


def _check_state_equality(
    rng: np.random.Generator, n_kappa: int, fault_kappa_shift: float
) -> CheckResult:
    worst = -1.0
    worst_detail: dict = {}
    for kappa in _random_kappas(rng, n_kappa):
        kappa_y = float(np.clip(kappa + fault_kappa_shift, 1e-9, 1.0))
        x_state = states.virtual_joint_state("X", float(kappa))
        y_state = states.virtual_joint_state("Y", kappa_y)
        residual, chi = states.phase_align(x_state, y_state)
        if residual > worst:
            worst = residual
            worst_detail = {"kappa": float(kappa), "aligning_phase": chi}
    return CheckResult(
        name="virtual_state_basis_independence",
        passed=worst < 1e-12,
        residual=worst,
        tolerance=1e-12,
        detail=worst_detail,
    )


def _check_filter_proportionality(
    rng: np.random.Generator, n_kappa: int
) -> CheckResult:
    worst = -1.0
    worst_detail: dict = {}
    for kappa in _random_kappas(rng, n_kappa):
        kappa = float(kappa)
        filtered, success = states.filtered_bell_state(kappa)
        target = states.virtual_joint_state("X", kappa)
        residual, chi = states.phase_align(target, filtered)
        residual = max(residual, abs(success - (1.0 + kappa) / 2.0))
        if residual > worst:
            worst = residual
            worst_detail = {"kappa": kappa, "aligning_phase": chi}
    return CheckResult(
        name="filter_proportionality",
        passed=worst < 1e-12,
        residual=worst,
        tolerance=1e-12,
        detail=worst_detail,
    )


def _check_povm(
    rng: np.random.Generator, n_points: int
) -> tuple[CheckResult, CheckResult]:
    worst_validity = -1.0
    worst_phi = -1.0
    for _ in range(n_points):
        kappa = float(1.0 - rng.random())
        eta = float(1.0 - rng.random())
        phi = float(rng.uniform(0.0, 2.0 * np.pi))
        elements = states.bob_povm(phi, kappa, eta)
        total = np.zeros((2, 2), dtype=complex)
        for el in elements:
            worst_validity = max(
                worst_validity,
                float(np.abs(el - el.conj().T).max()),
                max(0.0, -float(np.linalg.eigvalsh(el).min())),
            )
            total += el
        worst_validity = max(
            worst_validity, float(np.abs(total - np.eye(2)).max())
        )
        fail_x = states.bob_povm(0.0, kappa, eta)[2]
        fail_y = states.bob_povm(np.pi / 2.0, kappa, eta)[2]
        worst_phi = max(worst_phi, float(np.abs(fail_x - fail_y).max()))
    validity = CheckResult(
        name="povm_validity",
        passed=worst_validity < 1e-10,
        residual=worst_validity,
        tolerance=1e-10,
    )
    basis_free = CheckResult(
        name="failure_povm_basis_independence",
        passed=worst_phi < 1e-12,
        residual=worst_phi,
        tolerance=1e-12,
    )
    return validity, basis_free


def _check_reach_probabilities(rng: np.random.Generator, n_points: int) -> CheckResult:
    """Detection probabilities implied by the interferometer mode map.

    Unbalanced: kappa-weighted single photon against the POVM with the lossy
    modulator on the reference arm -> eta*kappa/(1+kappa).  Hardware fix:
    balanced photon against the POVM with both arms attenuated by kappa
    (equivalently unit unbalance at efficiency eta*kappa) -> eta*kappa/2.
    """
    worst = -1.0
    for _ in range(n_points):
        kappa = float(1.0 - rng.random())
        eta = float(1.0 - rng.random())
        for basis, phi in (("X", 0.0), ("Y", np.pi / 2.0)):
            for a in (0, 1):
                psi = states.alice_single_photon(a, basis, kappa)
                f0, f1, _ = states.bob_povm(phi, kappa, eta)
                got = float(np.vdot(psi, (f0 + f1) @ psi).real)
                worst = max(worst, abs(got - eta * kappa / (1.0 + kappa)))

                psi_fix = states.alice_single_photon(a, basis, 1.0)
                f0, f1, _ = states.bob_povm(phi, 1.0, eta * kappa)
                got_fix = float(np.vdot(psi_fix, (f0 + f1) @ psi_fix).real)
                worst = max(worst, abs(got_fix - eta * kappa / 2.0))
    return CheckResult(
        name="single_photon_reach_probability",
        passed=worst < 1e-12,
        residual=worst,
        tolerance=1e-12,
    )


def _check_fock_consistency(
    rng: np.random.Generator, n_points: int
) -> tuple[CheckResult, CheckResult]:
    worst_prob = -1.0
    worst_fid = -1.0
    theta_by_bit_basis = {(0, "X"): 0.0, (0, "Y"): np.pi / 2.0,
                          (1, "X"): np.pi, (1, "Y"): 3.0 * np.pi / 2.0}
    for _ in range(n_points):
        alpha = float(rng.uniform(0.05, 1.0))
        kappa = float(1.0 - rng.random())
        for (a, basis), theta in theta_by_bit_basis.items():
            dec = states.fock_decompose(alpha, kappa, theta, cutoff=20)
            mu = (1.0 + kappa) * alpha
            for n in range(6):
                poisson = math.exp(-mu) * mu**n / math.factorial(n)
                worst_prob = max(worst_prob, abs(dec.probs[n] - poisson))
            fid = states.fidelity(
                dec.conditional_states[1],
                states.alice_single_photon(a, basis, kappa),
            )
            worst_fid = max(worst_fid, 1.0 - fid)
    weights = CheckResult(
        name="photon_number_weights",
        passed=worst_prob < 1e-10,
        residual=worst_prob,
        tolerance=1e-10,
    )
    sector_state = CheckResult(
        name="single_photon_sector_state",
        passed=worst_fid < 1e-12,
        residual=worst_fid,
        tolerance=1e-12,
    )
    return weights, sector_state


def _check_phase_average(rng: np.random.Generator, n_points: int) -> CheckResult:
    worst = -1.0
    for _ in range(n_points):
        alpha = float(rng.uniform(0.05, 1.0))
        kappa = float(1.0 - rng.random())
        theta = float(rng.choice([0.0, np.pi / 2.0, np.pi, 3.0 * np.pi / 2.0]))
        dec = states.fock_decompose(alpha, kappa, theta, cutoff=6, tail_tol=None)
        direct = states.decomposition_density(dec)
        averaged = states.phase_average_density(alpha, kappa, theta, cutoff=6)
        worst = max(worst, states.trace_distance(direct, averaged))
    return CheckResult(
        name="phase_average_equivalence",
        passed=worst < 1e-9,
        residual=worst,
        tolerance=1e-9,
    )


def _check_channel_error_equality(
    rng: np.random.Generator, n_points: int
) -> CheckResult:
    worst = -1.0
    for _ in range(n_points):
        kappa = float(1.0 - rng.random())
        kraus = states.random_kraus_set(rng)
        errors = []
        for basis in ("X", "Y"):
            psi = states.virtual_joint_state(basis, kappa)
            rho = states.apply_channel_to_bob(np.outer(psi, psi.conj()), kraus)
            errors.append(states.conjugate_basis_error(rho))
        worst = max(worst, abs(errors[0] - errors[1]))
    return CheckResult(
        name="channel_independent_conjugate_error",
        passed=worst < 1e-12,
        residual=worst,
        tolerance=1e-12,
    )


def run_state_checks(
    seed: int = 20240521,
    n_kappa: int = 50,
    n_points: int = 20,
    fault_kappa_shift: float = 0.0,
) -> list[CheckResult]:
    """Run the whole battery; deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    results = [
        _check_state_equality(rng, n_kappa, fault_kappa_shift),
        _check_filter_proportionality(rng, n_kappa),
    ]
    results.extend(_check_povm(rng, n_points))
    results.append(_check_reach_probabilities(rng, n_points))
    results.extend(_check_fock_consistency(rng, n_points))
    results.append(_check_phase_average(rng, n_points))
    results.append(_check_channel_error_equality(rng, n_points))
    return results
