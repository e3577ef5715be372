"""Run configuration: one YAML document per run.

Top-level keys: ``scenario`` (pricing | supply), ``seed``, ``episodes``,
``output_dir``, and the sections ``agent``, ``env`` and (supply only)
``data``. Missing keys fall back to the default settings of each case.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from .agent import AgentConfig, DQNAgent
from .demand import DemandSeries, load_csv, normalize, synth_generate
from .nn import ConfigurationError
from .pricing import PricingConfig, PricingEnv
from .supply import SupplyConfig, SupplyEnv

AGENT_DEFAULTS = {
    "pricing": dict(hidden_sizes=(32, 32), gamma=0.3, epsilon_decay=0.97),
    "supply": dict(hidden_sizes=(64, 64), gamma=0.3, epsilon_decay=0.995),
}
EPISODE_DEFAULTS = {"pricing": 50, "supply": 300}


@dataclass
class DataConfig:
    path: str | None = None
    normalize: bool = True
    synth_days: int = 1050
    synth_seed: int = 0

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class RunConfig:
    scenario: str
    agent: AgentConfig
    env: PricingConfig | SupplyConfig
    episodes: int
    seed: int = 0
    data: DataConfig = field(default_factory=DataConfig)
    output_dir: str | None = None
    base_dir: Path = field(default=Path("."), repr=False, compare=False)

    def to_dict(self) -> dict:
        d = {
            "scenario": self.scenario,
            "seed": self.seed,
            "episodes": self.episodes,
            "output_dir": self.output_dir,
            "agent": self.agent.to_dict(),
            "env": self.env.to_dict(),
        }
        if self.scenario == "supply":
            d["data"] = self.data.to_dict()
            if self.data.path:
                d["data"]["path"] = str(self.data_path())
        return d

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def state_dim(self) -> int:
        return PricingEnv.state_dim if self.scenario == "pricing" else self.env.state_dim

    def data_path(self) -> Path | None:
        if not self.data.path:
            return None
        path = Path(self.data.path)
        return path if path.is_absolute() else (self.base_dir / path).resolve()

    def load_series(self) -> DemandSeries:
        if self.data.path:
            series = load_csv(self.data_path())
            return normalize(series) if self.data.normalize else series
        return synth_generate(self.data.synth_seed, self.data.synth_days)

    def env_factory(self):
        if self.scenario == "pricing":
            return lambda: PricingEnv(self.env)
        series = self.load_series()
        return lambda: SupplyEnv(series, self.env)

    def make_agent(self) -> DQNAgent:
        return DQNAgent.create(self.state_dim(), self.agent, self.seed)

    def make_rng(self) -> np.random.Generator:
        # the agent uses [seed, 1]; keep the environment stream separate
        return np.random.default_rng([self.seed, 2])


def _section(raw: dict, key: str) -> dict:
    sec = raw.get(key) or {}
    if not isinstance(sec, dict):
        raise ConfigurationError(f"'{key}' must be a mapping")
    return dict(sec)


def _build(cls, values: dict, where: str):
    names = {f.name for f in fields(cls)}
    unknown = set(values) - names
    if unknown:
        raise ConfigurationError(f"unknown key(s) in '{where}': {sorted(unknown)}")
    try:
        return cls(**values)
    except TypeError as exc:
        raise ConfigurationError(f"'{where}': {exc}") from None


def parse_config(raw: dict, base_dir=".") -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a mapping")
    unknown = set(raw) - {"scenario", "seed", "episodes", "output_dir", "agent", "env", "data"}
    if unknown:
        raise ConfigurationError(f"unknown top-level key(s): {sorted(unknown)}")
    scenario = raw.get("scenario")
    if scenario not in ("pricing", "supply"):
        raise ConfigurationError(f"scenario must be 'pricing' or 'supply', got {scenario!r}")

    env_cls = PricingConfig if scenario == "pricing" else SupplyConfig
    env = _build(env_cls, _section(raw, "env"), "env")

    agent_vals = {**AGENT_DEFAULTS[scenario], **_section(raw, "agent")}
    n_actions = len(env.actions)
    if agent_vals.setdefault("n_actions", n_actions) != n_actions:
        raise ConfigurationError(f"agent.n_actions={agent_vals['n_actions']} but env has {n_actions} actions")
    agent = _build(AgentConfig, agent_vals, "agent")

    if scenario == "pricing" and raw.get("data"):
        raise ConfigurationError("'data' section only applies to the supply scenario")
    data = _build(DataConfig, _section(raw, "data"), "data")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigurationError(f"seed must be a non-negative integer, got {seed!r}")
    episodes = raw.get("episodes", EPISODE_DEFAULTS[scenario])
    if not isinstance(episodes, int) or episodes < 0:
        raise ConfigurationError(f"episodes must be a non-negative integer, got {episodes!r}")
    return RunConfig(scenario, agent, env, episodes, seed, data, raw.get("output_dir"), Path(base_dir))


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse config {path}: {exc}") from None
    return parse_config(raw, base_dir=path.parent)


def default_config(scenario: str, **overrides) -> RunConfig:
    return parse_config({"scenario": scenario, **overrides})
