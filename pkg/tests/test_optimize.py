import math
from dataclasses import replace

import numpy as np
import pytest

from ubb84 import Scenario, SystemParams, compute_observables, key_rate
from ubb84.optimize import (
    RatePoint,
    SweepConfig,
    maximize_scalar,
    optimize_alpha,
    sweep_distance,
)

GYS_BASE = SystemParams(kappa=0.5, alpha=0.5, eta_det=0.045, xi=0.21, l=0.0,
                        p_d=8.5e-7, f_ec=1.22)


def rate_at(base, scenario, l, alpha):
    p = replace(base, alpha=alpha, l=l)
    return key_rate(compute_observables(p, scenario), p.f_ec)


class TestMaximizeScalar:
    def test_synthetic_quadratic(self):
        x, fx = maximize_scalar(lambda a: -((a - 0.3) ** 2), 1e-4, 2.0, tol=1e-5)
        assert abs(x - 0.3) <= 1e-5
        assert fx == -((x - 0.3) ** 2)

    def test_maximum_at_boundary(self):
        x, _ = maximize_scalar(lambda a: a, 1e-4, 2.0, tol=1e-6)
        assert x == pytest.approx(2.0, abs=1e-6)

    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            maximize_scalar(lambda a: a, 0.0, 2.0, tol=1e-5)
        with pytest.raises(ValueError):
            maximize_scalar(lambda a: a, 1e-4, 2.0, tol=0.0)

    def test_result_beats_every_coarse_point(self):
        f = lambda a: math.sin(5.0 * a) / (1.0 + a)
        _, fx = maximize_scalar(f, 1e-4, 2.0, tol=1e-6)
        assert all(fx >= f(g) for g in np.geomspace(1e-4, 2.0, 64))


class TestOptimizeAlpha:
    def test_matches_dense_grid_argmax(self):
        # oracle: brute-force argmax on a 10^5-point uniform grid
        alpha_opt, rate_opt = optimize_alpha(GYS_BASE, Scenario.UNBALANCED, 20.0)
        grid = np.linspace(1e-4, 2.0, 100_000)
        rates = [rate_at(GYS_BASE, Scenario.UNBALANCED, 20.0, a) for a in grid]
        dense_alpha = grid[int(np.argmax(rates))]
        assert abs(alpha_opt - dense_alpha) < 1e-3
        assert rate_opt >= max(rates) - 1e-9

    def test_short_distance_optimum_tracks_photon_number_peak(self):
        # with negligible dark counts the optimum sits where the
        # single-photon emission probability peaks: alpha = 1/(1+kappa)
        alpha_opt, _ = optimize_alpha(GYS_BASE, Scenario.UNBALANCED, 0.0)
        assert alpha_opt == pytest.approx(1.0 / 1.5, abs=5e-3)
        alpha_fix, _ = optimize_alpha(GYS_BASE, Scenario.HARDWARE_FIX, 0.0)
        assert alpha_fix == pytest.approx(1.0, abs=5e-3)

    def test_degenerate_beyond_cutoff(self):
        _, rate_opt = optimize_alpha(GYS_BASE, Scenario.UNBALANCED, 300.0)
        assert rate_opt <= 0.0

    def test_stable_under_tolerance_halving(self):
        a1, _ = optimize_alpha(GYS_BASE, Scenario.UNBALANCED, 50.0, tol=1e-5)
        a2, _ = optimize_alpha(GYS_BASE, Scenario.UNBALANCED, 50.0, tol=5e-6)
        assert abs(a1 - a2) <= 2e-5


class TestSweepDistance:
    def test_balanced_scenarios_identical(self):
        base = replace(GYS_BASE, kappa=1.0)
        sweeps = [
            sweep_distance(SweepConfig(0.0, 60.0, 20.0, base, scen))
            for scen in (Scenario.UNBALANCED, Scenario.HARDWARE_FIX)
        ]
        (pts_a, cut_a), (pts_b, cut_b) = sweeps
        assert cut_a == cut_b
        for a, b in zip(pts_a, pts_b):
            assert abs(a.alpha_opt - b.alpha_opt) < 1e-12
            assert abs(a.rate - b.rate) < 1e-12

    def test_hardware_fix_shortens_reach(self):
        cuts = {}
        for scen in (Scenario.UNBALANCED, Scenario.HARDWARE_FIX):
            cfg = SweepConfig(0.0, 140.0, 20.0, GYS_BASE, scen)
            points, cuts[scen] = sweep_distance(cfg)
            rates = [p.rate for p in points if p.rate > 0.0]
            assert rates == sorted(rates, reverse=True)  # strictly decreasing
        assert cuts[Scenario.HARDWARE_FIX] < cuts[Scenario.UNBALANCED]

    def test_rate_points_self_consistent(self):
        cfg = SweepConfig(0.0, 40.0, 20.0, GYS_BASE, Scenario.UNBALANCED)
        points, _ = sweep_distance(cfg)
        for p in points:
            again = rate_at(GYS_BASE, Scenario.UNBALANCED, p.l, p.alpha_opt)
            assert abs(p.rate - again) < 1e-12
            assert p.rate_clamped == max(p.rate, 0.0)
            assert not p.degenerate

    def test_degenerate_rows_emitted_not_dropped(self):
        cfg = SweepConfig(250.0, 290.0, 20.0, GYS_BASE, Scenario.UNBALANCED)
        points, cutoff = sweep_distance(cfg)
        assert len(points) == 3
        assert all(p.degenerate and p.rate_clamped == 0.0 for p in points)
        assert math.isnan(cutoff)

    def test_cutoff_is_lmax_when_always_positive(self):
        cfg = SweepConfig(0.0, 40.0, 20.0, GYS_BASE, Scenario.UNBALANCED)
        _, cutoff = sweep_distance(cfg)
        assert cutoff == 40.0

    def test_bit_stable_across_runs(self):
        cfg = SweepConfig(0.0, 140.0, 35.0, GYS_BASE, Scenario.HARDWARE_FIX)
        assert sweep_distance(cfg) == sweep_distance(cfg)

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            SweepConfig(10.0, 0.0, 5.0, GYS_BASE, Scenario.UNBALANCED)
        with pytest.raises(ValueError):
            SweepConfig(0.0, 10.0, -1.0, GYS_BASE, Scenario.UNBALANCED)
        with pytest.raises(ValueError):
            SweepConfig(0.0, 10.0, 5.0, GYS_BASE, Scenario.UNBALANCED,
                        alpha_lo=0.5, alpha_hi=0.1)


class TestRegressionLockedCutoffs:
    """Cutoff distances frozen from the first verified run of this
    implementation (no printed reference values exist to compare against)."""

    def test_gys_cutoffs(self):
        expected = {
            (1.0, Scenario.UNBALANCED): 145.0,
            (0.5, Scenario.UNBALANCED): 136.6,
            (0.5, Scenario.HARDWARE_FIX): 130.7,
        }
        for (kappa, scen), want in expected.items():
            cfg = SweepConfig(100.0, 160.0, 10.0,
                              replace(GYS_BASE, kappa=kappa), scen)
            _, cutoff = sweep_distance(cfg)
            assert cutoff == pytest.approx(want, abs=0.15), (kappa, scen)
