"""Closed-form detection statistics and asymptotic key rate for phase-encoded
BB84 with unequal double-pulse intensities.

The signal and reference time-bin pulses leave the source with intensity
ratio kappa (the transmittance of each lossy phase modulator).  Two
configurations are modelled:

* ``UNBALANCED``  -- the interferometer is used as-is; the matched-basis
  detector sees mean photon number kappa*beta and a single photon reaches
  its detector with probability eta*kappa/(1+kappa).
* ``HARDWARE_FIX`` -- extra attenuators re-balance the pulses, which is the
  ideal protocol with additional loss: detector mean kappa^2*beta, photon
  reach probability eta*kappa/2.

All bit errors stem from dark counts; double clicks are assigned a random
bit, which is why every error term carries a factor p_d and the double-click
contribution enters with weight 1/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "Scenario",
    "SystemParams",
    "Observables",
    "binary_entropy",
    "overall_transmittance",
    "compute_observables",
    "key_rate",
]


class Scenario(enum.Enum):
    """Which interferometer configuration the statistics describe."""

    UNBALANCED = "unbalanced"
    HARDWARE_FIX = "fix"


@dataclass(frozen=True)
class SystemParams:
    """Experimental scalars of one operating point.

    kappa    : transmittance of each phase modulator, in (0, 1]; kappa=1 is
               the ideal balanced protocol
    alpha    : mean photon number of the reference pulse at the source, > 0
    eta_det  : detector quantum efficiency, in (0, 1]
    xi       : fiber loss coefficient in dB/km, >= 0
    l        : Alice-Bob distance in km, >= 0
    p_d      : dark count probability per detector per gate, in [0, 0.5)
    f_ec     : error-correction inefficiency factor, >= 1
    """

    kappa: float
    alpha: float
    eta_det: float
    xi: float
    l: float
    p_d: float
    f_ec: float = 1.22

    def __post_init__(self) -> None:
        checks = [
            ("kappa", 0.0 < self.kappa <= 1.0, "(0, 1]"),
            ("alpha", self.alpha > 0.0, "(0, inf)"),
            ("eta_det", 0.0 < self.eta_det <= 1.0, "(0, 1]"),
            ("xi", self.xi >= 0.0, "[0, inf)"),
            ("l", self.l >= 0.0, "[0, inf)"),
            ("p_d", 0.0 <= self.p_d < 0.5, "[0, 0.5)"),
            ("f_ec", self.f_ec >= 1.0, "[1, inf)"),
        ]
        for name, ok, rng in checks:
            if not ok:
                raise ValueError(
                    f"{name}={getattr(self, name)!r} outside valid range {rng}"
                )


@dataclass(frozen=True)
class Observables:
    """The six derived quantities of one scenario, plus eta and beta.

    gamma_X1 is the single-photon part of the gain gamma_X; e_Y1 is the
    single-photon error rate in the conjugate basis, which in this model
    equals the phase error rate entering privacy amplification.
    """

    eta: float
    beta: float
    gamma_X: float
    E_X: float
    p1: float
    gamma_X1: float
    e_Y1: float

    def __post_init__(self) -> None:
        checks = [
            ("eta", 0.0 < self.eta <= 1.0),
            ("beta", self.beta >= 0.0),
            ("gamma_X", 0.0 <= self.gamma_X <= 1.0),
            ("E_X", 0.0 <= self.E_X <= 0.5),
            ("p1", 0.0 <= self.p1 <= 1.0),
            ("gamma_X1", 0.0 <= self.gamma_X1 <= 1.0),
            ("e_Y1", 0.0 <= self.e_Y1 <= 0.5),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"{name}={getattr(self, name)!r} out of range")
        if self.gamma_X1 > self.gamma_X + 1e-12:
            raise ValueError(
                f"gamma_X1={self.gamma_X1!r} exceeds gamma_X={self.gamma_X!r}"
            )


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0 exactly."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy argument {x!r} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def overall_transmittance(params: SystemParams) -> float:
    """Overall transmittance eta = eta_det * 10^(-xi*l/10)."""
    return params.eta_det * 10.0 ** (-params.xi * params.l / 10.0)


def _click_stats(log_silent: float, p_d: float) -> tuple[float, float]:
    """Gain and error-weight of a two-detector gate.

    ``log_silent`` is the log-probability that the matched detector
    registers no optical event; the other detector sees no light.  Each
    detector fires independently on a dark count.  With
    q = (1-p_d)*exp(log_silent), returns per gate:

        gain = 1 - (1-p_d)^2 * exp(log_silent)
        err  = q*p_d + (1/2)*(1 - q)*p_d = p_d*(1 + q)/2

    i.e. a lone dark count on the wrong detector, or a double click whose
    random bit assignment lands on the wrong value.  Taking the log keeps
    1 - e^(-x) accurate for x below 1e-8.
    """
    q = (1.0 - p_d) * math.exp(log_silent)
    gain = -math.expm1(2.0 * math.log1p(-p_d) + log_silent)
    err = p_d * (1.0 + q) / 2.0
    return gain, err


def compute_observables(params: SystemParams, scenario: Scenario) -> Observables:
    """Evaluate all observable quantities for one parameter point.

    The coherent-pulse gain/QBER use the matched-basis detector mean
    (kappa*beta or kappa^2*beta); the single-photon yield and conjugate-basis
    error use the per-photon reach probability (eta*kappa/(1+kappa) or
    eta*kappa/2) together with the single-photon emission probability p1.
    """
    eta = overall_transmittance(params)
    beta = params.alpha * eta
    kappa = params.kappa
    p_d = params.p_d

    if scenario is Scenario.UNBALANCED:
        mu = kappa * beta
        mu_source = (1.0 + kappa) * params.alpha
        reach = eta * kappa / (1.0 + kappa)
    elif scenario is Scenario.HARDWARE_FIX:
        mu = kappa * kappa * beta
        mu_source = 2.0 * kappa * params.alpha
        reach = eta * kappa / 2.0
    else:
        raise ValueError(f"unknown scenario {scenario!r}")

    p1 = math.exp(-mu_source) * mu_source

    gamma, err = _click_stats(-mu, p_d)
    E_X = err / gamma if gamma > 0.0 else 0.0

    gain1, err1 = _click_stats(math.log1p(-reach), p_d)
    gamma_X1 = gain1 * p1
    # p1 cancels between the printed numerator and denominator of e_Y1
    e_Y1 = err1 / gain1 if gain1 > 0.0 else 0.0

    return Observables(
        eta=eta,
        beta=beta,
        gamma_X=gamma,
        E_X=E_X,
        p1=p1,
        gamma_X1=gamma_X1,
        e_Y1=e_Y1,
    )


def key_rate(obs: Observables, f_ec: float) -> float:
    """Asymptotic secret bits per pulse; may be negative.

    R = -gamma_X * f_ec * h(E_X) + gamma_X1 * [1 - h(e_Y1)]

    The single-photon conjugate-basis error rate enters privacy
    amplification directly; callers clamp negative values to zero for
    reporting.
    """
    return (
        -obs.gamma_X * f_ec * binary_entropy(obs.E_X)
        + obs.gamma_X1 * (1.0 - binary_entropy(obs.e_Y1))
    )
