"""Unbalanced-BB84 key-rate toolkit.

Closed-form detection statistics and secret-key rate, the single-photon
security-algebra (states, filters, POVMs), a seeded Monte Carlo detection
oracle, and an intensity optimizer for key-rate-vs-distance curves.
"""

from ubb84.rates import (
    Observables,
    Scenario,
    SystemParams,
    binary_entropy,
    compute_observables,
    key_rate,
    overall_transmittance,
)

__all__ = [
    "Observables",
    "Scenario",
    "SystemParams",
    "binary_entropy",
    "compute_observables",
    "key_rate",
    "overall_transmittance",
]

__version__ = "0.1.0"
