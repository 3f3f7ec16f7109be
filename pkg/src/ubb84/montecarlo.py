"""Seeded Monte Carlo sampler of the detection process.

Validates the closed-form statistics by simulating individual detector
gates: threshold detectors click on coherent light with probability
1 - e^(-mu), independently OR-ed with a dark count of probability p_d;
a lone click records that detector's bit, a double click records a uniform
random bit, and no-click gates count toward the gain denominator only.

Reproducibility contract: trials are partitioned into fixed blocks of
10^6; block i draws from numpy's PCG64 seeded with
``SeedSequence(seed).spawn(n_blocks)[i]``, and within a block the draw
order is (bit, optical D0, dark D0, optical D1, dark D1, double-click
tiebreak), each a full vector of the block length.  Results are integer
counts merged over blocks, so identical TrialConfig values give
bit-identical estimates regardless of how blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ubb84.rates import Scenario, SystemParams, overall_transmittance

__all__ = [
    "BLOCK_SIZE",
    "TrialConfig",
    "MCEstimate",
    "detector_means",
    "sample_click_pairs",
    "tally_recorded_bits",
    "simulate_gain_qber",
    "simulate_single_photon",
]

BLOCK_SIZE = 1_000_000
_MAX_TRIALS = 2**40


@dataclass(frozen=True)
class TrialConfig:
    """Number of simulated gates and the master seed."""

    n_trials: int
    seed: int

    def __post_init__(self) -> None:
        if not 1 <= self.n_trials <= _MAX_TRIALS:
            raise ValueError(f"n_trials={self.n_trials!r} outside [1, 2^40]")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed={self.seed!r} does not fit in 64 bits")


@dataclass(frozen=True)
class MCEstimate:
    """Bernoulli-rate estimate: mean, std_error = sqrt(mean(1-mean)/n)."""

    mean: float
    std_error: float
    n_trials: int
    seed: int

    def z_score(self, target: float) -> float:
        """Standardized deviation from ``target``, scaled by the binomial
        spread the target itself implies (score test).  Unlike dividing by
        the estimated std_error, this stays meaningful when a rare-event
        count happens to be zero; inf when no spread is available at all."""
        if self.n_trials and 0.0 < target < 1.0:
            spread = math.sqrt(target * (1.0 - target) / self.n_trials)
            return (self.mean - target) / spread
        if self.std_error > 0.0:
            return (self.mean - target) / self.std_error
        if self.mean == target:
            return 0.0
        return math.inf

    @property
    def degenerate(self) -> bool:
        return self.n_trials < 2


def _estimate(successes: int, n: int, seed: int) -> MCEstimate:
    if n == 0:
        return MCEstimate(mean=math.nan, std_error=math.nan, n_trials=0, seed=seed)
    mean = successes / n
    return MCEstimate(
        mean=mean,
        std_error=math.sqrt(mean * (1.0 - mean) / n),
        n_trials=n,
        seed=seed,
    )


def detector_means(
    params: SystemParams, scenario: Scenario, theta: float, phi: float
):
    """Mean photon numbers (mu0, mu1) at the two detectors.

    The interfering pulse pair carries kappa*beta photons on average
    (kappa^2*beta with the balancing attenuators), split by the relative
    modulation phase:

        mu0 = base * (1 + cos(theta - phi)) / 2
        mu1 = base * (1 - cos(theta - phi)) / 2

    so a matched correct bit (theta = phi) puts everything on D0.
    Accepts scalar or array theta/phi.
    """
    beta = params.alpha * overall_transmittance(params)
    if scenario is Scenario.UNBALANCED:
        base = params.kappa * beta
    elif scenario is Scenario.HARDWARE_FIX:
        base = params.kappa**2 * beta
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    c = np.cos(np.asarray(theta) - np.asarray(phi))
    return base * (1.0 + c) / 2.0, base * (1.0 - c) / 2.0


def sample_click_pairs(rng, p_opt0, p_opt1, p_d: float, n: int):
    """One block of detector gates from per-detector optical click
    probabilities; consumes only (p_opt0, p_opt1, p_d), so any model that
    produces click probabilities can drive the same trial layer."""
    click0 = (rng.random(n) < p_opt0) | (rng.random(n) < p_d)
    click1 = (rng.random(n) < p_opt1) | (rng.random(n) < p_d)
    return click0, click1


def _block_sizes(n_trials: int) -> list[int]:
    full, rest = divmod(n_trials, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def tally_recorded_bits(rng, click0, click1, bits):
    """Recorded-bit bookkeeping on one block of gates: lone click records
    that detector's bit, double click records a fresh uniform bit.  Returns
    (clicked gates, wrong-bit gates).  The tiebreak vector is always drawn
    so the stream layout is fixed."""
    n = len(bits)
    tiebreak = rng.integers(0, 2, n)
    clicked = click0 | click1
    double = click0 & click1
    recorded = np.where(double, tiebreak, np.where(click1, 1, 0))
    errors = clicked & (recorded != bits)
    return int(clicked.sum()), int(errors.sum())


def simulate_gain_qber(
    params: SystemParams, scenario: Scenario, cfg: TrialConfig
) -> tuple[MCEstimate, MCEstimate]:
    """Estimate the coherent-pulse gain and sifted-key error rate.

    Per trial the bit is uniform, Alice's modulation is theta = pi*bit and
    Bob's matched-basis setting is phi = 0; the QBER estimate is
    conditioned on gates with at least one click.
    """
    sizes = _block_sizes(cfg.n_trials)
    children = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    n_clicked = n_errors = 0
    for size, child in zip(sizes, children):
        rng = np.random.default_rng(child)
        bits = rng.integers(0, 2, size)
        mu0, mu1 = detector_means(params, scenario, np.pi * bits, 0.0)
        click0, click1 = sample_click_pairs(
            rng, -np.expm1(-mu0), -np.expm1(-mu1), params.p_d, size
        )
        clicked, errors = tally_recorded_bits(rng, click0, click1, bits)
        n_clicked += clicked
        n_errors += errors
    gain = _estimate(n_clicked, cfg.n_trials, cfg.seed)
    qber = _estimate(n_errors, n_clicked, cfg.seed)
    return gain, qber


def simulate_single_photon(
    params: SystemParams,
    scenario: Scenario,
    cfg: TrialConfig,
    reach_probability: float | None = None,
) -> tuple[MCEstimate, MCEstimate]:
    """Estimate the single-photon click rate and conditional error rate.

    Conditioned on a single-photon emission: the photon reaches the
    matched detector with probability eta*kappa/(1+kappa) (or eta*kappa/2
    with the balancing attenuators) and is lost otherwise; errors come
    from dark counts alone.  The click-rate estimate must be multiplied by
    the single-photon emission probability before comparing with the
    closed-form yield.  ``reach_probability`` overrides the closed form so
    the same trial layer can be driven from the measurement-operator route.
    """
    if reach_probability is None:
        eta = overall_transmittance(params)
        if scenario is Scenario.UNBALANCED:
            reach = eta * params.kappa / (1.0 + params.kappa)
        else:
            reach = eta * params.kappa / 2.0
    else:
        reach = reach_probability
    if not 0.0 <= reach <= 1.0:
        raise ValueError(f"reach probability {reach!r} outside [0, 1]")

    sizes = _block_sizes(cfg.n_trials)
    children = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    n_clicked = n_errors = 0
    for size, child in zip(sizes, children):
        rng = np.random.default_rng(child)
        bits = rng.integers(0, 2, size)
        click0, click1 = sample_click_pairs(
            rng,
            np.where(bits == 0, reach, 0.0),
            np.where(bits == 1, reach, 0.0),
            params.p_d,
            size,
        )
        clicked, errors = tally_recorded_bits(rng, click0, click1, bits)
        n_clicked += clicked
        n_errors += errors
    gain1 = _estimate(n_clicked, cfg.n_trials, cfg.seed)
    err1 = _estimate(n_errors, n_clicked, cfg.seed)
    return gain1, err1
