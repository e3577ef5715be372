import numpy as np
import pytest
from scipy import stats

from salesdqn.demand import _series, synth_generate
from salesdqn.nn import ConfigurationError
from salesdqn.supply import SupplyConfig, SupplyEnv


def flat_series(demand, n=200, promo=None):
    d = np.full(n, demand) if np.isscalar(demand) else np.asarray(demand, dtype=float)
    n = len(d)
    return _series(d, np.zeros(n) if promo is None else promo, np.arange(n) % 7, np.arange(n))


def env_at(demand, stock=0.0, **cfg):
    env = SupplyEnv(flat_series(demand), SupplyConfig(lag_max=0, **cfg))
    env.reset(np.random.default_rng(0))
    env.stock = stock
    return env


def test_zero_supply_step():
    env = env_at(0.4)
    _, r, _ = env.step(0)
    tr = env.trace()
    assert (tr.sales[0], r) == (0.0, 0.0)
    assert tr.shortage[0] == tr.demand[0] == pytest.approx(0.4, abs=2**-33)


def test_oversupply_step():
    env = env_at(0.3)
    _, r, _ = env.step(6)  # 12 packs
    tr = env.trace()
    assert tr.supply[0] == pytest.approx(0.6)
    assert tr.sales[0] == pytest.approx(0.3)
    assert tr.stock[0] == pytest.approx(0.3)
    assert tr.shortage[0] == 0.0
    assert r == pytest.approx(0.0, abs=1e-12)


def test_partial_shortage_step():
    env = env_at(0.5, stock=0.2)
    _, r, _ = env.step(2)  # 4 packs
    tr = env.trace()
    assert tr.supply[0] == pytest.approx(0.2)
    assert tr.sales[0] == pytest.approx(0.4)
    assert tr.shortage[0] == pytest.approx(0.1)
    assert tr.stock[0] == pytest.approx(0.0, abs=1e-15)
    assert r == pytest.approx(0.3)


def test_state_vector_layout():
    n = 200
    promo = np.zeros(n)
    promo[5] = 1
    series = _series(np.linspace(0.1, 1.0, n), promo, (np.arange(n) + 3) % 7, np.arange(n))
    env = SupplyEnv(series, SupplyConfig(lag_max=0, episode_len=10))
    s = env.reset(np.random.default_rng(0))
    assert s.shape == (9,)
    assert s[0] == 0 and s[1] == 0.0 and s[2 + 3] == 1 and s[2:].sum() == 1
    for _ in range(5):
        s, _, _ = env.step(3)
    # day 5: promo on, weekday (5+3)%7 = 1, prev_sales = realised sales of day 4
    assert s[0] == 1 and s[2 + 1] == 1
    assert s[1] == env.trace().sales[-1]


def test_stock_feature_optional():
    env = SupplyEnv(flat_series(0.3), SupplyConfig(lag_max=0, include_stock_feature=True))
    s = env.reset(np.random.default_rng(0))
    assert s.shape == (10,) and env.state_dim == 10
    s, _, _ = env.step(6)
    assert s[-1] == pytest.approx(0.3)


def test_prev_sales_at_reset_uses_day_before_window():
    series = flat_series(np.linspace(0.0, 1.0, 300))
    env = SupplyEnv(series, SupplyConfig(lag_max=25))
    rng = np.random.default_rng(4)
    for _ in range(20):
        s = env.reset(rng)
        expected = series.demand[env.lag - 1] if env.lag > 0 else 0.0
        assert s[1] == expected


def test_lag_zero_fixed_window():
    env = SupplyEnv(flat_series(0.3), SupplyConfig(lag_max=0))
    rng = np.random.default_rng(1)
    for _ in range(10):
        env.reset(rng)
        assert env.lag == 0


def test_lag_deterministic():
    def lags(seed):
        env = SupplyEnv(flat_series(0.3), SupplyConfig())
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(50):
            env.reset(rng)
            out.append(env.lag)
        return out
    assert lags(3) == lags(3)


def test_lag_uniform_chi_square():
    env = SupplyEnv(flat_series(0.3), SupplyConfig(lag_max=25))
    rng = np.random.default_rng(77)
    counts = np.zeros(26)
    for _ in range(10_000):
        env.reset(rng)
        counts[env.lag] += 1
    assert stats.chisquare(counts).pvalue > 0.001


def test_series_too_short():
    env = SupplyEnv(flat_series(0.3, n=100), SupplyConfig())
    with pytest.raises(ConfigurationError):
        env.reset(np.random.default_rng(0))


def test_episode_runs_full_length():
    env = SupplyEnv(flat_series(0.3), SupplyConfig(lag_max=0))
    env.reset(np.random.default_rng(0))
    steps, done = 0, False
    while not done:
        _, _, done = env.step(3)
        steps += 1
    assert steps == 150 and len(env.trace()) == 150
    with pytest.raises(RuntimeError):
        env.step(0)


def test_early_stop():
    # 12 packs with zero demand: reward -0.3 < -0.25
    env = SupplyEnv(flat_series(0.0), SupplyConfig(lag_max=0))
    env.reset(np.random.default_rng(0))
    _, r, done = env.step(6)
    assert r == pytest.approx(-0.3) and done
    assert len(env.trace()) == 1


def test_zero_supply_episode_earns_nothing():
    env = SupplyEnv(synth_generate(0, 400), SupplyConfig())
    env.reset(np.random.default_rng(0))
    total, done = 0.0, False
    while not done:
        _, r, done = env.step(0)
        total += r
    assert total == 0.0


def test_random_steps_invariants():
    series = synth_generate(1, 1050)
    env = SupplyEnv(series, SupplyConfig())
    rng = np.random.default_rng(11)
    env.reset(rng)
    for _ in range(1000):
        if env.done:
            env.reset(rng)
        stock0 = env.stock
        _, r, _ = env.step(int(rng.integers(7)))
        tr = env.trace()
        d, sup, s, st, sh = tr.demand[-1], tr.supply[-1], tr.sales[-1], tr.stock[-1], tr.shortage[-1]
        assert st + s == stock0 + sup
        assert 0 <= s <= d and sh == d - s and sh >= 0 and st >= 0
        assert r <= env.config.price_profit * d
