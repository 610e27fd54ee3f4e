"""Experiment configuration, INI round-tripping and seeded RNG streams."""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field, fields

import numpy as np

SCENARIOS = ("known-metric", "majority", "adaptive-attack", "pac-learn", "incompressibility")

# section each field lives in when written as INI
_SECTIONS = {
    "problem": ("n", "ell", "lam", "t_class"),
    "attack": ("delta", "lam_est", "trials", "epsilon_threshold", "target_class", "subject",
               "fooling_tolerance", "gamma_report", "eta"),
    "experiments": ("perturbation_trials", "incompress_trials", "incompress_tolerance", "rhos",
                    "retention", "pac_runs", "pac_eval_samples"),
    "run": ("master_seed", "out_dir"),
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    n: int = 8
    ell: int = 1024
    lam: int = 128
    t_class: int | None = None  # None means n // 2 + 1
    delta: float = 0.05
    lam_est: float = 64.0
    trials: int = 200
    epsilon_threshold: float = 0.1
    target_class: int = 1
    subject: str = "partial:0,1,2"
    fooling_tolerance: float = 0.05
    # measured, not configured; echoed so records carry them
    gamma_report: float | None = None
    eta: float | None = None
    perturbation_trials: int = 1000
    incompress_trials: int = 10_000
    incompress_tolerance: float = 0.02
    rhos: tuple[float, ...] = (0.0, 0.5, 0.9, 0.99, 1.0)
    retention: str = "prefix"
    pac_runs: int = 100
    pac_eval_samples: int = 20
    master_seed: int = 0
    out_dir: str = "results"

    def __post_init__(self):
        if self.t_class is None:
            self.t_class = self.n // 2 + 1
        self.rhos = tuple(float(r) for r in self.rhos)
        self.validate()

    def validate(self) -> None:
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if self.lam % 8 or self.ell % 8 or self.ell < self.lam:
            raise ConfigError("lam and ell must be multiples of 8 with ell >= lam")
        if not 1 <= self.t_class <= self.n:
            raise ConfigError("t_class must lie in [1, n]")
        if not 0 < self.delta <= 0.5 or self.lam_est < 1:
            raise ConfigError("need 0 < delta <= 1/2 and lam_est >= 1")
        if self.target_class not in (0, 1):
            raise ConfigError("target_class must be 0 or 1")
        if min(self.trials, self.perturbation_trials, self.incompress_trials, self.pac_runs) < 1:
            raise ConfigError("trial counts must be positive")
        if any(not 0 <= r <= 1 for r in self.rhos):
            raise ConfigError("rhos must lie in [0, 1]")
        if self.master_seed < 0:
            raise ConfigError("seed must be non-negative")

    def replace(self, **changes) -> "ExperimentConfig":
        if "n" in changes and "t_class" not in changes:
            changes["t_class"] = None
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["rhos"] = list(self.rhos)
        return out

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        values = self.as_dict()
        for section, keys in _SECTIONS.items():
            cp[section] = {}
            for k in keys:
                v = values[k]
                if v is None:
                    v = ""
                elif isinstance(v, list):
                    v = ", ".join(repr(x) for x in v)
                cp[section][k] = str(v)
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str, **overrides) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"unreadable config: {exc}") from None
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for section in cp.sections():
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]")
            for key, raw in cp[section].items():
                if key not in _SECTIONS[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                kwargs[key] = _parse(types[key], raw, key)
        kwargs.update(overrides)
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def _parse(type_name: str, raw: str, key: str):
    raw = raw.strip()
    try:
        if "None" in type_name and raw == "":
            return None
        if type_name.startswith("int"):
            return int(raw)
        if type_name.startswith("float"):
            return float(raw)
        if type_name.startswith("tuple"):
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def scenario_rng(cfg: ExperimentConfig, scenario: str, *sub: int) -> np.random.Generator:
    """Generator for ``(master_seed, scenario index, *sub)``.

    Streams come from ``SeedSequence(master_seed, spawn_key=(k, *sub))``
    with ``k`` the scenario's position in :data:`SCENARIOS`, so each stream
    depends only on the seed and its counter path.
    """
    k = SCENARIOS.index(scenario)
    ss = np.random.SeedSequence(cfg.master_seed, spawn_key=(k, *sub))
    return np.random.Generator(np.random.PCG64(ss))
