"""Single-photon security algebra for the unbalanced double-pulse encoding.

Fixed conventions, used everywhere:

* Dual-rail single-photon space, ordered basis (|0_Z>, |1_Z>) with
  |0_Z> = photon in the reference pulse, |1_Z> = photon in the signal pulse.
* Joint Alice-Bob states are A-major: index 2*a + b over the Z basis.
* Two-mode Fock sectors with n total photons are (n+1)-dimensional and
  ordered by the signal-mode photon count k = 0..n, so the n=1 sector
  coincides with the dual-rail ordering above.
* Global-phase-insensitive comparison aligns the phase at the
  largest-magnitude amplitude of the reference vector, then takes the
  Euclidean norm of the difference.

States are plain complex128 numpy vectors; operators are square complex128
matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "alice_single_photon",
    "qubit_state",
    "virtual_joint_state",
    "alice_filter",
    "filtered_bell_state",
    "FockDecomposition",
    "fock_decompose",
    "decomposition_density",
    "phase_average_density",
    "trace_distance",
    "bob_povm",
    "phase_align",
    "fidelity",
    "random_kraus_set",
    "apply_channel_to_bob",
    "conjugate_basis_error",
]

_BASES = ("X", "Y")


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 < value <= 1.0:
        raise ValueError(f"{name}={value!r} outside (0, 1]")


def qubit_state(j: int, basis: str) -> np.ndarray:
    """Qubit eigenstate |j_W> in the Z-ordered dual-rail basis.

    |j_X> = (|0_Z> + (-1)^j |1_Z>)/sqrt(2)
    |j_Y> = (e^(-i pi/4)|0_Z> + (-1)^j e^(i pi/4)|1_Z>)/sqrt(2)
    """
    if j not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {j!r}")
    sign = 1.0 if j == 0 else -1.0
    if basis == "X":
        vec = np.array([1.0, sign], dtype=complex)
    elif basis == "Y":
        vec = np.array([np.exp(-1j * np.pi / 4), sign * np.exp(1j * np.pi / 4)])
    else:
        raise ValueError(f"basis must be one of {_BASES}, got {basis!r}")
    return vec / math.sqrt(2.0)


def alice_single_photon(a: int, basis: str, kappa: float) -> np.ndarray:
    """Single-photon part of the pulse pair Alice sends for bit ``a``.

    The lossy modulator leaves the signal amplitude a factor sqrt(kappa)
    below the reference:

        (|0_Z> + (-1)^a sqrt(kappa) |1_Z>) / sqrt(1 + kappa)          (X)
        (e^(-i pi/4)|0_Z> + (-1)^a sqrt(kappa) e^(i pi/4)|1_Z>) / ...  (Y)
    """
    if a not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {a!r}")
    _check_unit_interval("kappa", kappa)
    sk = math.sqrt(kappa) * (1.0 if a == 0 else -1.0)
    if basis == "X":
        vec = np.array([1.0, sk], dtype=complex)
    elif basis == "Y":
        vec = np.array([np.exp(-1j * np.pi / 4), sk * np.exp(1j * np.pi / 4)])
    else:
        raise ValueError(f"basis must be one of {_BASES}, got {basis!r}")
    return vec / math.sqrt(1.0 + kappa)


def virtual_joint_state(basis: str, kappa: float) -> np.ndarray:
    """Entangled state Alice holds before measuring her bit in ``basis``.

    (1/sqrt(2)) * (|0_W>_A |0_W^(1)>_B - |1_W>_A |1_W^(1)>_B), built from
    the printed per-basis definitions; the equality of the X and Y forms is
    what the verification battery checks, so no simplification is applied.
    """
    terms = [
        np.kron(qubit_state(j, basis), alice_single_photon(j, basis, kappa))
        for j in (0, 1)
    ]
    return (terms[0] - terms[1]) / math.sqrt(2.0)


def alice_filter(kappa: float) -> np.ndarray:
    """Kraus operator of Alice's successful filtering operation.

    sqrt(kappa)|0_Z><0_Z| + |1_Z><1_Z|; attenuates the reference-photon
    component the way the lossy modulator attenuates the signal.
    """
    _check_unit_interval("kappa", kappa)
    return np.diag([math.sqrt(kappa), 1.0]).astype(complex)


def filtered_bell_state(kappa: float) -> tuple[np.ndarray, float]:
    """Apply Alice's filter to one side of the Bell state (|01>+|10>)/sqrt(2).

    Returns the renormalized post-selected state and the success
    probability, recorded as the squared norm of the unnormalized output
    (analytically (1 + kappa)/2).
    """
    bell = np.zeros(4, dtype=complex)
    bell[1] = bell[2] = 1.0 / math.sqrt(2.0)
    filtered = np.kron(alice_filter(kappa), np.eye(2)) @ bell
    success = float(np.vdot(filtered, filtered).real)
    return filtered / math.sqrt(success), success


# --- photon-number decomposition of the phase-randomized pulse pair -------


@dataclass(frozen=True)
class FockDecomposition:
    """Photon-number mixture of the phase-randomized two-mode pulse.

    probs[n] is the weight of the n-photon sector up to ``cutoff``;
    conditional_states[n] is the normalized (n+1)-dimensional sector state
    ordered by signal-mode photon count.
    """

    cutoff: int
    probs: np.ndarray
    conditional_states: list[np.ndarray]


def _sector_amplitudes(
    amp_signal: complex, amp_reference: complex, cutoff: int
) -> list[np.ndarray]:
    """Unnormalized Fock-sector amplitudes of |amp_signal>_s |amp_reference>_r.

    Includes the coherent-state normalization e^(-mu/2), so squared norms
    across all sectors sum to one as cutoff -> infinity.
    """
    mu = abs(amp_signal) ** 2 + abs(amp_reference) ** 2
    pref = math.exp(-mu / 2.0)
    sectors = []
    for n in range(cutoff + 1):
        k = np.arange(n + 1)
        log_fact = [math.lgamma(i + 1.0) for i in k]
        coeff = (
            amp_signal ** k
            * amp_reference ** (n - k)
            * np.exp(-0.5 * np.array(log_fact) - 0.5 * np.array(log_fact[::-1]))
        )
        sectors.append(pref * coeff.astype(complex))
    return sectors


def fock_decompose(
    alpha: float,
    kappa: float,
    theta: float,
    cutoff: int = 20,
    tail_tol: float | None = 1e-12,
) -> FockDecomposition:
    """Decompose the phase-randomized pulse pair into photon-number sectors.

    The pulse pair carries amplitudes (e^(i theta) sqrt(kappa*alpha),
    sqrt(alpha)) on (signal, reference); randomizing the common optical
    phase removes all coherence between total-photon-number sectors,
    leaving Poisson weights with mean (1+kappa)*alpha.  Sector weights are
    computed from the projected amplitudes, not from the Poisson closed
    form, so the two routes can be compared in tests.

    Raises ValueError when the Poisson mass beyond ``cutoff`` exceeds
    ``tail_tol`` (pass tail_tol=None for deliberately coarse cutoffs).
    """
    if alpha <= 0.0:
        raise ValueError(f"alpha={alpha!r} must be positive")
    _check_unit_interval("kappa", kappa)
    if cutoff < 2:
        raise ValueError(f"cutoff={cutoff!r} must be at least 2")

    mu = (1.0 + kappa) * alpha
    if tail_tol is not None:
        tail = 1.0 - math.fsum(
            math.exp(-mu) * mu**n / math.factorial(n) for n in range(cutoff + 1)
        )
        if tail > tail_tol:
            raise ValueError(
                f"cutoff={cutoff} leaves Poisson tail {tail:.3e} > {tail_tol:.3e} "
                f"for source mean {mu:.4f}"
            )

    sectors = _sector_amplitudes(
        np.exp(1j * theta) * math.sqrt(kappa * alpha), math.sqrt(alpha), cutoff
    )
    probs = np.array([float(np.vdot(s, s).real) for s in sectors])
    states = [s / math.sqrt(p) for s, p in zip(sectors, probs)]
    return FockDecomposition(cutoff=cutoff, probs=probs, conditional_states=states)


def _sector_offsets(cutoff: int) -> list[int]:
    return [n * (n + 1) // 2 for n in range(cutoff + 2)]


def decomposition_density(dec: FockDecomposition) -> np.ndarray:
    """Block-diagonal density matrix of a FockDecomposition, stacked over
    sectors n = 0..cutoff (dimension (cutoff+1)(cutoff+2)/2)."""
    offsets = _sector_offsets(dec.cutoff)
    rho = np.zeros((offsets[-1], offsets[-1]), dtype=complex)
    for n, (p, state) in enumerate(zip(dec.probs, dec.conditional_states)):
        lo, hi = offsets[n], offsets[n + 1]
        rho[lo:hi, lo:hi] = p * np.outer(state, state.conj())
    return rho


def phase_average_density(
    alpha: float,
    kappa: float,
    theta: float,
    cutoff: int,
    n_phases: int = 256,
) -> np.ndarray:
    """Average of the pure pulse-pair projector over the random optical phase.

    Independent route to the same density matrix as ``decomposition_density
    (fock_decompose(...))``: each of ``n_phases`` equally spaced phases zeta
    builds the full truncated two-mode coherent vector from scratch, and the
    projectors are averaged (the uniform phase sum is the trapezoid rule on
    a 2*pi-periodic integrand).
    """
    offsets = _sector_offsets(cutoff)
    rho = np.zeros((offsets[-1], offsets[-1]), dtype=complex)
    for zeta in 2.0 * np.pi * np.arange(n_phases) / n_phases:
        sectors = _sector_amplitudes(
            np.exp(1j * (zeta + theta)) * math.sqrt(kappa * alpha),
            np.exp(1j * zeta) * math.sqrt(alpha),
            cutoff,
        )
        psi = np.concatenate(sectors)
        rho += np.outer(psi, psi.conj())
    return rho / n_phases


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(1/2) * trace norm of rho - sigma for Hermitian arguments."""
    return 0.5 * float(np.abs(np.linalg.eigvalsh(rho - sigma)).sum())


# --- Bob's measurement ------------------------------------------------------


def bob_povm(
    phi: float, kappa: float, eta: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single-photon POVM (click at D0, click at D1, no click).

    The interferometer maps each dual-rail mode through one balanced split
    on entry and one at the recombining coupler (amplitude 1/2 per path,
    middle time bin only), with the detector efficiency commuted in as a
    scalar amplitude sqrt(eta) and Bob's lossy modulator contributing
    sqrt(kappa) e^(i phi) on the reference mode:

        signal    -> (sqrt(eta)/2) (d0 + d1)               + loss
        reference -> (sqrt(eta*kappa) e^(i phi)/2) (d0 - d1) + loss

    The failure element I - F0 - F1 = diag(1 - eta*kappa/2, 1 - eta/2) is
    independent of phi, i.e. of Bob's basis choice.
    """
    _check_unit_interval("kappa", kappa)
    _check_unit_interval("eta", eta)
    ref = math.sqrt(eta * kappa) * np.exp(1j * phi) / 2.0
    sig = math.sqrt(eta) / 2.0
    m0 = np.array([ref, sig])
    m1 = np.array([-ref, sig])
    f0 = np.outer(m0.conj(), m0)
    f1 = np.outer(m1.conj(), m1)
    return f0, f1, np.eye(2, dtype=complex) - f0 - f1


# --- comparison helpers and channel checks ---------------------------------


def phase_align(reference: np.ndarray, other: np.ndarray) -> tuple[float, float]:
    """Global-phase-insensitive distance between two state vectors.

    Rotates ``other`` so its phase matches ``reference`` at the
    largest-magnitude amplitude of ``reference``; returns the Euclidean
    residual and the aligning phase chi in (-pi, pi].
    """
    i = int(np.argmax(np.abs(reference)))
    if abs(other[i]) == 0.0:
        return float(np.linalg.norm(reference - other)), 0.0
    chi = float(np.angle(reference[i]) - np.angle(other[i]))
    chi = math.remainder(chi, 2.0 * math.pi)
    residual = float(np.linalg.norm(reference - np.exp(1j * chi) * other))
    return residual, chi


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|<u|v>|^2 for normalized state vectors."""
    return float(abs(np.vdot(u, v)) ** 2)


def random_kraus_set(
    rng: np.random.Generator, n_ops: int = 3, dim: int = 2
) -> list[np.ndarray]:
    """Random trace-preserving Kraus set: Gaussian operators renormalized by
    the inverse square root of their completeness sum."""
    ops = [
        rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        for _ in range(n_ops)
    ]
    total = sum(op.conj().T @ op for op in ops)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(vals**-0.5) @ vecs.conj().T
    return [op @ inv_sqrt for op in ops]


def apply_channel_to_bob(rho: np.ndarray, kraus: list[np.ndarray]) -> np.ndarray:
    """Apply a channel to the B half of a two-qubit density matrix."""
    out = np.zeros_like(rho)
    for op in kraus:
        big = np.kron(np.eye(2), op)
        out += big @ rho @ big.conj().T
    return out


def conjugate_basis_error(rho: np.ndarray, basis: str = "Y") -> float:
    """Probability that Alice's and Bob's ``basis`` outcomes disagree on a
    two-qubit state (Bob measured in the ideal qubit basis)."""
    err = 0.0
    for j in (0, 1):
        pa = qubit_state(j, basis)
        pb = qubit_state(1 - j, basis)
        proj = np.kron(np.outer(pa, pa.conj()), np.outer(pb, pb.conj()))
        err += float(np.trace(proj @ rho).real)
    return err
