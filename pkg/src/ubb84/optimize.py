"""Source-intensity optimization and key-rate-vs-distance sweeps.

The rate as a function of intensity is a smooth product of Poisson factors
and is treated as unimodal once bracketed; a 64-point log-spaced pre-scan
guards against refining around a secondary bump.  The returned optimum is
the best point actually evaluated, so it never falls below any coarse-grid
value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from ubb84.rates import (
    Observables,
    Scenario,
    SystemParams,
    compute_observables,
    key_rate,
)

__all__ = [
    "SweepConfig",
    "RatePoint",
    "maximize_scalar",
    "optimize_alpha",
    "sweep_distance",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
CUTOFF_RESOLUTION_KM = 0.1


@dataclass(frozen=True)
class SweepConfig:
    """Distance grid and per-point optimization settings.

    ``base_params`` supplies every scalar except the intensity and the
    distance, which the sweep overwrites point by point.
    """

    l_min: float
    l_max: float
    l_step: float
    base_params: SystemParams
    scenario: Scenario
    alpha_lo: float = 1e-4
    alpha_hi: float = 2.0
    alpha_tol: float = 1e-5

    def __post_init__(self) -> None:
        if self.l_min > self.l_max:
            raise ValueError(f"l_min={self.l_min!r} exceeds l_max={self.l_max!r}")
        if self.l_step <= 0.0:
            raise ValueError(f"l_step={self.l_step!r} must be positive")
        if not 0.0 < self.alpha_lo < self.alpha_hi:
            raise ValueError(
                f"need 0 < alpha_lo < alpha_hi, got ({self.alpha_lo!r}, "
                f"{self.alpha_hi!r})"
            )
        if self.alpha_tol <= 0.0:
            raise ValueError(f"alpha_tol={self.alpha_tol!r} must be positive")

    def distances(self) -> list[float]:
        n = int(math.floor((self.l_max - self.l_min) / self.l_step + 1e-9)) + 1
        return [self.l_min + i * self.l_step for i in range(n)]


@dataclass(frozen=True)
class RatePoint:
    """One sweep record: distance, maximizing intensity, raw rate, and the
    observables at that point.  ``degenerate`` marks distances where no
    intensity achieves a positive rate; those rows report rate_clamped 0."""

    l: float
    alpha_opt: float
    rate: float
    observables: Observables

    @property
    def rate_clamped(self) -> float:
        return max(self.rate, 0.0)

    @property
    def degenerate(self) -> bool:
        return self.rate <= 0.0


def maximize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    n_coarse: int = 64,
) -> tuple[float, float]:
    """Maximize ``f`` on [lo, hi]: log-spaced coarse scan, then
    golden-section refinement of the bracket around the best coarse point.

    Returns the best evaluated (x, f(x)); requires lo > 0 for the log grid.
    """
    if not 0.0 < lo < hi:
        raise ValueError(f"need 0 < lo < hi, got ({lo!r}, {hi!r})")
    if tol <= 0.0:
        raise ValueError(f"tol={tol!r} must be positive")

    grid = np.geomspace(lo, hi, n_coarse)
    values = [f(float(x)) for x in grid]
    best_i = int(np.argmax(values))
    best_x, best_f = float(grid[best_i]), values[best_i]

    a = float(grid[max(best_i - 1, 0)])
    b = float(grid[min(best_i + 1, n_coarse - 1)])
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        for x, fx in ((c, fc), (d, fd)):
            if fx > best_f:
                best_x, best_f = x, fx
    return best_x, best_f


def optimize_alpha(
    base_params: SystemParams,
    scenario: Scenario,
    l: float,
    bounds: tuple[float, float] = (1e-4, 2.0),
    tol: float = 1e-5,
) -> tuple[float, float]:
    """Maximize the key rate over the source intensity at distance ``l``.

    Returns (alpha_opt, rate_opt); rate_opt <= 0 signals a degenerate
    point beyond the cutoff distance.
    """

    def rate_at(alpha: float) -> float:
        p = replace(base_params, alpha=alpha, l=l)
        return key_rate(compute_observables(p, scenario), p.f_ec)

    return maximize_scalar(rate_at, bounds[0], bounds[1], tol)


def sweep_distance(cfg: SweepConfig) -> tuple[list[RatePoint], float]:
    """Optimize every grid distance and locate the cutoff.

    The cutoff is the largest distance with a positive optimized rate,
    refined by bisection to 0.1 km between the last positive and the first
    non-positive grid distances; it is nan when no grid distance yields a
    positive rate, and l_max when every one does.
    """

    def optimum(l: float) -> tuple[float, float]:
        return optimize_alpha(
            cfg.base_params,
            cfg.scenario,
            l,
            bounds=(cfg.alpha_lo, cfg.alpha_hi),
            tol=cfg.alpha_tol,
        )

    points = []
    for l in cfg.distances():
        alpha_opt, rate = optimum(l)
        obs = compute_observables(
            replace(cfg.base_params, alpha=alpha_opt, l=l), cfg.scenario
        )
        points.append(RatePoint(l=l, alpha_opt=alpha_opt, rate=rate,
                                observables=obs))

    positive = [p.l for p in points if p.rate > 0.0]
    if not positive:
        return points, math.nan
    lo = positive[-1]
    later = [p.l for p in points if p.l > lo and p.rate <= 0.0]
    if not later:
        return points, points[-1].l
    hi = later[0]
    while hi - lo > CUTOFF_RESOLUTION_KM:
        mid = 0.5 * (lo + hi)
        if optimum(mid)[1] > 0.0:
            lo = mid
        else:
            hi = mid
    return points, lo
