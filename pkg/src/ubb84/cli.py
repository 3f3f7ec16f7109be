"""Command-line front end.

Subcommands: ``rate`` (single-point observables and key rate, JSON),
``curve`` (optimized key-rate-vs-distance sweep, CSV), ``verify`` (security
algebra property battery, JSON), ``mc`` (Monte Carlo vs closed form, JSON).

Exit codes: 0 success, 1 verification or statistical failure, 2 invalid
configuration, 3 every sweep distance degenerate.  All output is a pure
function of the resolved configuration, with floats rendered at 17
significant digits so golden files are bit-stable.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from ubb84 import checks, rates
from ubb84.config import ConfigError, RunConfig, apply_overrides, load_config
from ubb84.montecarlo import simulate_gain_qber, simulate_single_photon
from ubb84.optimize import sweep_distance

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

CSV_HEADER = "l_km,alpha_opt,rate,rate_clamped,gamma_X,E_X,p1,gamma_X1,e_Y1,eta"

GNUPLOT_TEMPLATE = """\
set datafile separator ','
set key autotitle columnhead
set logscale y
set xlabel 'distance (km)'
set ylabel 'secret bits per pulse'
set grid
plot '{csv}' using 1:4 with lines lw 2 title 'optimized key rate', \\
     '' using 1:2 with lines dt 2 title 'optimal intensity'
"""


def fmt(x: float) -> str:
    """17-significant-digit decimal rendering (round-trips any double)."""
    return format(float(x), ".17g")


def render_json(obj, _pad: str = "") -> str:
    """Deterministic JSON with floats at 17 significant digits; non-finite
    floats render as null (their meaning is carried by explicit flags)."""
    inner = _pad + "  "
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f'{inner}{json.dumps(str(k))}: {render_json(v, inner)}'
                 for k, v in obj.items())
        return "{\n" + ",\n".join(items) + f"\n{_pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = (f"{inner}{render_json(v, inner)}" for v in obj)
        return "[\n" + ",\n".join(items) + f"\n{_pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot render {type(obj)!r}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_rate(cfg: RunConfig, args) -> int:
    params = cfg.system_params()
    obs = rates.compute_observables(params, cfg.scenario)
    rate = rates.key_rate(obs, params.f_ec)
    report = {
        "scenario": cfg.scenario.value,
        "params": asdict(params),
        "observables": asdict(obs),
        "rate": rate,
        "rate_clamped": max(rate, 0.0),
    }
    _emit(render_json(report) + "\n", args.out)
    return EXIT_OK


def cmd_curve(cfg: RunConfig, args) -> int:
    points, cutoff = sweep_distance(cfg.sweep_config())
    rows = [CSV_HEADER]
    for p in points:
        o = p.observables
        rows.append(",".join(fmt(v) for v in (
            p.l, p.alpha_opt, p.rate, p.rate_clamped,
            o.gamma_X, o.E_X, o.p1, o.gamma_X1, o.e_Y1, o.eta,
        )))
    _emit("\n".join(rows) + "\n", args.out)
    print(f"cutoff_km={fmt(cutoff)}", file=sys.stderr)

    if args.gnuplot_script is not None:
        if args.out is None:
            raise ConfigError("--gnuplot-script requires --out for the CSV path")
        Path(args.gnuplot_script).write_text(
            GNUPLOT_TEMPLATE.format(csv=args.out)
        )
    if all(p.degenerate for p in points):
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    results = checks.run_state_checks(
        seed=cfg.seed, fault_kappa_shift=args.fault_kappa_shift
    )
    report = {
        "seed": cfg.seed,
        "all_passed": all(r.passed for r in results),
        "checks": [
            {
                "name": r.name,
                "passed": r.passed,
                "residual": r.residual,
                "tolerance": r.tolerance,
                **({"detail": r.detail} if r.detail else {}),
            }
            for r in results
        ],
    }
    _emit(render_json(report) + "\n", args.out)
    if not report["all_passed"]:
        failed = [r.name for r in results if not r.passed]
        worst = max((r.residual for r in results if not r.passed), default=0.0)
        print(f"FAILED {', '.join(failed)} (worst residual {worst:.3e})",
              file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_mc(cfg: RunConfig, args) -> int:
    params = cfg.system_params()
    obs = rates.compute_observables(params, cfg.scenario)
    trial_cfg = cfg.trial_config()
    gain, qber = simulate_gain_qber(params, cfg.scenario, trial_cfg)
    gain1, err1 = simulate_single_photon(params, cfg.scenario, trial_cfg)

    entries = []
    for name, est, target, scale in (
        ("gamma_X", gain, obs.gamma_X, 1.0),
        ("E_X", qber, obs.E_X, 1.0),
        ("gamma_X1", gain1, obs.gamma_X1, obs.p1),
        ("e_Y1", err1, obs.e_Y1, 1.0),
    ):
        z = est.z_score(target / scale if scale != 1.0 else target)
        entries.append({
            "name": name,
            "estimate": est.mean * scale if est.n_trials else math.nan,
            "std_error": est.std_error * scale if est.n_trials else math.nan,
            "samples": est.n_trials,
            "target": target,
            "z": z,
            "degenerate": est.degenerate,
            "passed": (not est.degenerate) and abs(z) <= 4.0,
        })
    report = {
        "scenario": cfg.scenario.value,
        "n_trials": trial_cfg.n_trials,
        "seed": trial_cfg.seed,
        "all_passed": all(e["passed"] for e in entries),
        "estimates": entries,
    }
    _emit(render_json(report) + "\n", args.out)
    return EXIT_OK if report["all_passed"] else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ubb84",
        description="Key-rate model for BB84 with unbalanced pulse intensities",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "rate": (cmd_rate, "closed-form observables and key rate at one point"),
        "curve": (cmd_curve, "optimized key rate vs distance as CSV"),
        "verify": (cmd_verify, "security-algebra property battery"),
        "mc": (cmd_mc, "Monte Carlo validation of the closed forms"),
    }
    for name, (fn, help_text) in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--config", metavar="PATH", help="INI config document")
        p.add_argument("--scenario", choices=["unbalanced", "fix"])
        p.add_argument("--kappa", type=float, metavar="K")
        p.add_argument("--alpha", type=float, metavar="A")
        p.add_argument("--distance", type=float, metavar="KM")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--out", metavar="PATH", help="write report here "
                       "instead of stdout")
        if name == "curve":
            p.add_argument("--gnuplot-script", metavar="PATH",
                           help="also write a gnuplot script plotting the CSV")
        if name == "verify":
            p.add_argument("--fault-kappa-shift", type=float, default=0.0,
                           metavar="D", help="self-test seam: desynchronize "
                           "the conjugate-basis unbalance by D")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = apply_overrides(
            cfg,
            scenario=args.scenario,
            kappa=args.kappa,
            alpha=args.alpha,
            distance=args.distance,
            seed=args.seed,
            trials=args.trials,
        )
        return args.fn(cfg, args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
