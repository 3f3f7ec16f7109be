"""Run configuration: an INI document plus command-line overrides.

Sections and keys mirror the dataclasses they feed; unknown sections or
keys are rejected with the offending line number.  Defaults are the GYS
(Gobby-Yuan-Shields) experiment values: f_ec=1.22, p_d=8.5e-7,
xi=0.21 dB/km, eta_det=0.045.

    [params]
    kappa = 0.5
    alpha = 0.5
    l = 20
    ; eta_det, xi, p_d, f_ec default to the GYS values

    [scenario]
    tag = unbalanced        ; or: fix

    [sweep]
    l_min = 0
    l_max = 150
    l_step = 5
    ; alpha_lo, alpha_hi, alpha_tol default to 1e-4, 2.0, 1e-5

    [mc]
    trials = 1000000
    seed = 12345
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path

from ubb84.montecarlo import TrialConfig
from ubb84.optimize import SweepConfig
from ubb84.rates import Scenario, SystemParams

__all__ = ["ConfigError", "RunConfig", "load_config", "apply_overrides"]


class ConfigError(Exception):
    """Invalid configuration document or incomplete parameter set."""


_SCHEMA = {
    "params": {"kappa", "alpha", "eta_det", "xi", "l", "p_d", "f_ec"},
    "scenario": {"tag"},
    "sweep": {"l_min", "l_max", "l_step", "alpha_lo", "alpha_hi", "alpha_tol"},
    "mc": {"trials", "seed"},
}

_SCENARIO_TAGS = {s.value: s for s in Scenario}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration; alpha and l stay None until supplied
    because single-point commands require them explicitly."""

    kappa: float = 1.0
    alpha: float | None = None
    l: float | None = None
    eta_det: float = 0.045
    xi: float = 0.21
    p_d: float = 8.5e-7
    f_ec: float = 1.22
    scenario: Scenario = Scenario.UNBALANCED
    l_min: float = 0.0
    l_max: float = 150.0
    l_step: float = 5.0
    alpha_lo: float = 1e-4
    alpha_hi: float = 2.0
    alpha_tol: float = 1e-5
    trials: int = 1_000_000
    seed: int = 12345

    def system_params(self) -> SystemParams:
        if self.alpha is None or self.l is None:
            missing = [n for n in ("alpha", "l") if getattr(self, n) is None]
            raise ConfigError(
                f"explicit value required for {', '.join(missing)} "
                f"(set [params] in the config file or pass --alpha/--distance)"
            )
        return SystemParams(
            kappa=self.kappa, alpha=self.alpha, eta_det=self.eta_det,
            xi=self.xi, l=self.l, p_d=self.p_d, f_ec=self.f_ec,
        )

    def sweep_config(self) -> SweepConfig:
        # the sweep optimizes alpha and scans l, so base placeholders are
        # overwritten at every grid point
        base = SystemParams(
            kappa=self.kappa, alpha=1.0, eta_det=self.eta_det,
            xi=self.xi, l=0.0, p_d=self.p_d, f_ec=self.f_ec,
        )
        return SweepConfig(
            l_min=self.l_min, l_max=self.l_max, l_step=self.l_step,
            base_params=base, scenario=self.scenario,
            alpha_lo=self.alpha_lo, alpha_hi=self.alpha_hi,
            alpha_tol=self.alpha_tol,
        )

    def trial_config(self) -> TrialConfig:
        return TrialConfig(n_trials=self.trials, seed=self.seed)


def _line_of(lines: list[str], section: str, key: str | None = None) -> str:
    current = None
    for i, raw in enumerate(lines, 1):
        stripped = raw.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip().lower()
            if key is None and current == section:
                return f"line {i}"
        elif key is not None and current == section:
            head = stripped.split("=", 1)[0].split(":", 1)[0].strip().lower()
            if head == key:
                return f"line {i}"
    return "line ?"


def parse_scenario(tag: str) -> Scenario:
    try:
        return _SCENARIO_TAGS[tag]
    except KeyError:
        raise ConfigError(
            f"scenario tag {tag!r} not one of {sorted(_SCENARIO_TAGS)}"
        ) from None


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate an INI config document."""
    text = Path(path).read_text()
    lines = text.splitlines()
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    updates: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"{path}: unknown section [{section}] "
                f"({_line_of(lines, section)})"
            )
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"{path}: unknown key {key!r} in [{section}] "
                    f"({_line_of(lines, section, key)})"
                )
            try:
                if section == "scenario":
                    updates["scenario"] = parse_scenario(raw.strip())
                elif section == "mc":
                    updates[key] = int(raw)
                else:
                    updates[key] = float(raw)
            except (ValueError, ConfigError) as exc:
                raise ConfigError(
                    f"{path}: bad value for {key!r} in [{section}]: {exc} "
                    f"({_line_of(lines, section, key)})"
                ) from None
    return replace(RunConfig(), **updates)


def apply_overrides(
    cfg: RunConfig,
    scenario: str | None = None,
    kappa: float | None = None,
    alpha: float | None = None,
    distance: float | None = None,
    seed: int | None = None,
    trials: int | None = None,
) -> RunConfig:
    """Command-line flags win over config-file values."""
    updates: dict = {}
    if scenario is not None:
        updates["scenario"] = parse_scenario(scenario)
    if kappa is not None:
        updates["kappa"] = kappa
    if alpha is not None:
        updates["alpha"] = alpha
    if distance is not None:
        updates["l"] = distance
    if seed is not None:
        updates["seed"] = seed
    if trials is not None:
        updates["trials"] = trials
    return replace(cfg, **updates)
