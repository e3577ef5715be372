"""Supply-demand environment driven by a historical (or synthetic) demand series.

Each day the agent orders a number of packs. Supplied product joins the
stock, sales are capped by what is available, and the leftover carries over
to the next day. Reward is ``price_profit * sales - price_support * supplied``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .demand import DemandSeries
from .nn import ConfigurationError

DEFAULT_PACKS = (0, 2, 4, 6, 8, 10, 12)

# Quantities live on a 2**-32 grid so stock/sales bookkeeping is exact in
# float64 (sums stay exact up to magnitudes of about 2**21).
_GRID_BITS = 32


def _snap(x: float) -> float:
    return float(np.ldexp(np.round(np.ldexp(x, _GRID_BITS)), -_GRID_BITS))


@dataclass
class SupplyConfig:
    actions: tuple = DEFAULT_PACKS
    pack_unit: float = 0.05
    price_profit: float = 1.0
    price_support: float = 0.5
    episode_len: int = 150
    lag_max: int = 25
    stop_reward: float = -0.25
    include_stock_feature: bool = False

    def __post_init__(self):
        self.actions = tuple(int(a) for a in self.actions)
        if not self.actions or min(self.actions) < 0:
            raise ConfigurationError("actions must be a nonempty list of non-negative pack counts")
        if self.pack_unit <= 0:
            raise ConfigurationError("pack_unit must be positive")
        if self.episode_len < 1:
            raise ConfigurationError("episode_len must be >= 1")
        if self.lag_max < 0:
            raise ConfigurationError("lag_max must be >= 0")

    @property
    def state_dim(self) -> int:
        return 9 + int(self.include_stock_feature)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["actions"] = list(self.actions)
        return d


@dataclass
class SupplyState:
    promo: int
    prev_sales: float
    weekday: int
    stock: float | None = None

    def as_array(self) -> np.ndarray:
        onehot = np.zeros(7)
        onehot[self.weekday] = 1.0
        head = [float(self.promo), self.prev_sales]
        tail = [] if self.stock is None else [self.stock]
        return np.concatenate([head, onehot, tail])


@dataclass
class EpisodeTrace:
    demand: list = field(default_factory=list)
    supply: list = field(default_factory=list)
    sales: list = field(default_factory=list)
    stock: list = field(default_factory=list)
    shortage: list = field(default_factory=list)
    weekday: list = field(default_factory=list)
    action: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.demand)


class SupplyEnv:
    def __init__(self, series: DemandSeries, config: SupplyConfig | None = None):
        self.series = series
        self.config = config or SupplyConfig()
        self.lag = 0
        self.t = 0
        self.stock = 0.0
        self.prev_sales = 0.0
        self.done = True
        self._trace = EpisodeTrace()

    @property
    def n_actions(self) -> int:
        return len(self.config.actions)

    @property
    def state_dim(self) -> int:
        return self.config.state_dim

    @property
    def day(self) -> int:
        return self.lag + self.t

    @property
    def weekday(self) -> int:
        """Weekday of the day the next action applies to."""
        if self.day < len(self.series):
            return int(self.series.weekday[self.day])
        last = len(self.series) - 1
        return int((self.series.weekday[last] + self.day - last) % 7)

    def state(self) -> SupplyState:
        promo = int(self.series.promo[self.day]) if self.day < len(self.series) else 0
        stock = self.stock if self.config.include_stock_feature else None
        return SupplyState(promo, self.prev_sales, self.weekday, stock)

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        cfg = self.config
        if len(self.series) < cfg.lag_max + cfg.episode_len:
            raise ConfigurationError(
                f"demand series has {len(self.series)} days, need at least "
                f"lag_max + episode_len = {cfg.lag_max + cfg.episode_len}")
        self.lag = int(rng.integers(0, cfg.lag_max + 1))
        self.t = 0
        self.stock = 0.0
        self.prev_sales = float(self.series.demand[self.lag - 1]) if self.lag > 0 else 0.0
        self.done = False
        self._trace = EpisodeTrace()
        return self.state().as_array()

    def step(self, action: int) -> tuple[np.ndarray, float, bool]:
        if self.done:
            raise RuntimeError("episode finished; call reset()")
        if not 0 <= action < self.n_actions:
            raise IndexError(f"action {action} out of range")
        cfg = self.config
        demand = _snap(self.series.demand[self.day])
        weekday = self.weekday
        supply = _snap(cfg.actions[action] * cfg.pack_unit)
        available = self.stock + supply
        sales = min(demand, available)
        shortage = demand - sales
        self.stock = available - sales
        r = cfg.price_profit * sales - cfg.price_support * supply

        tr = self._trace
        tr.demand.append(demand)
        tr.supply.append(supply)
        tr.sales.append(sales)
        tr.stock.append(self.stock)
        tr.shortage.append(shortage)
        tr.weekday.append(weekday)
        tr.action.append(action)

        self.prev_sales = sales
        self.t += 1
        self.done = self.t >= cfg.episode_len or r < cfg.stop_reward
        return self.state().as_array(), r, self.done

    def trace(self) -> EpisodeTrace:
        return self._trace
