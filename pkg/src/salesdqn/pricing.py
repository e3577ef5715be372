"""Extra-price optimisation environment.

Sales respond to the extra price (a markup in fractions of the marginal
price) through a decreasing logistic curve; the per-step reward is
``demand * F_sales(p) * p`` with demand drawn uniformly each day.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .nn import ConfigurationError

DEFAULT_ACTIONS = (0.0, 0.15, 0.25, 0.5, 0.75, 0.85, 1.0, 1.5)


@dataclass
class PricingConfig:
    price_m: float = 1.0
    a: float = 1.0
    b: float = 1.0
    c: float = 7.0
    d: float = 1.7
    actions: tuple = DEFAULT_ACTIONS
    episode_len: int = 7
    demand_low: float = 0.0
    demand_high: float = 1.0

    def __post_init__(self):
        self.actions = tuple(float(p) for p in self.actions)
        if not self.actions:
            raise ConfigurationError("actions must be nonempty")
        if any(q <= p for p, q in zip(self.actions, self.actions[1:])):
            raise ConfigurationError("actions must be strictly increasing")
        if self.episode_len < 1:
            raise ConfigurationError("episode_len must be >= 1")
        if self.a <= 0 or self.b <= 0:
            raise ConfigurationError("a and b must be positive")
        if self.price_m <= 0:
            raise ConfigurationError("price_m must be positive")
        if not self.demand_low < self.demand_high:
            raise ConfigurationError("demand_low must be below demand_high")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["actions"] = list(self.actions)
        return d


def f_sales(config: PricingConfig, extra_price):
    """Relative sales ``a / (1 + b*exp(c*(price_m*(1+p) - d)))``.

    Evaluated as ``a * sigmoid(-(x + log b))`` so large exponents saturate
    instead of overflowing.
    """
    x = config.c * (config.price_m * (1.0 + np.asarray(extra_price, dtype=np.float64)) - config.d)
    z = -(x + np.log(config.b))
    e = np.exp(-np.abs(z))
    out = config.a * np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(out) if out.ndim == 0 else out


def reward(config: PricingConfig, demand: float, extra_price: float) -> float:
    return demand * f_sales(config, extra_price) * extra_price


def profit_table(config: PricingConfig) -> np.ndarray:
    """``F_sales(p) * p`` for every action, the expected reward per unit demand."""
    p = np.asarray(config.actions)
    return np.atleast_1d(f_sales(config, p)) * p


def oracle_optimal_action(config: PricingConfig) -> tuple[int, float]:
    # demand scales every action equally, so the best action maximises F(p)*p
    table = profit_table(config)
    i = int(np.argmax(table))
    return i, float(table[i])


@dataclass
class PricingState:
    demand: float
    t_frac: float

    def as_array(self) -> np.ndarray:
        return np.array([self.demand, self.t_frac])


class PricingEnv:
    """Observation is ``[today's demand, step / episode_len]``."""

    state_dim = 2

    def __init__(self, config: PricingConfig | None = None):
        self.config = config or PricingConfig()
        self.rng: np.random.Generator | None = None
        self.t = 0
        self.demand = 0.0
        self.done = True

    @property
    def n_actions(self) -> int:
        return len(self.config.actions)

    def _draw_demand(self) -> float:
        return float(self.rng.uniform(self.config.demand_low, self.config.demand_high))

    def state(self) -> PricingState:
        return PricingState(self.demand, self.t / self.config.episode_len)

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self.rng = rng
        self.t = 0
        self.done = False
        self.demand = self._draw_demand()
        return self.state().as_array()

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        if self.done:
            raise RuntimeError("episode finished; call reset()")
        if not 0 <= action < self.n_actions:
            raise IndexError(f"action {action} out of range")
        r = reward(self.config, self.demand, self.config.actions[action])
        self.t += 1
        self.done = self.t >= self.config.episode_len
        self.demand = self._draw_demand()
        return self.state().as_array(), r, self.done
