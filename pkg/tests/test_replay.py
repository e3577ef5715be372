import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from salesdqn.replay import Experience, NotReady, ReplayBuffer


def exp(i, dim=2):
    return Experience(np.full(dim, float(i)), 0, float(i), np.full(dim, i + 1.0), False)


def test_fifo_eviction():
    buf = ReplayBuffer(2)
    a, b, c = exp(0), exp(1), exp(2)
    for e in (a, b, c):
        buf.push(e)
    assert buf.entries == [b, c]


def test_push_to_empty():
    buf = ReplayBuffer(5)
    buf.push(exp(0))
    assert len(buf) == 1


def test_many_pushes_cap_length():
    buf = ReplayBuffer(1000)
    for i in range(10_000):
        buf.push(exp(i))
    assert len(buf) == 1000
    assert buf[0].reward == 9000.0 and buf[-1].reward == 9999.0


def test_push_validates():
    buf = ReplayBuffer(3)
    with pytest.raises(ValueError):
        buf.push(Experience(np.zeros(2), 0, 0.0, np.zeros(3), False))
    with pytest.raises(ValueError):
        buf.push(Experience(np.zeros(2), 0, float("nan"), np.zeros(2), False))


def test_sample_full_batch_is_permutation():
    buf = ReplayBuffer(10)
    items = [exp(i) for i in range(8)]
    for e in items:
        buf.push(e)
    got = buf.sample(8, np.random.default_rng(0))
    assert sorted(e.reward for e in got) == [e.reward for e in items]


def test_sample_not_ready():
    buf = ReplayBuffer(10)
    buf.push(exp(0))
    with pytest.raises(NotReady):
        buf.sample(2, np.random.default_rng(0))


def test_sample_deterministic():
    buf = ReplayBuffer(100)
    for i in range(100):
        buf.push(exp(i))
    a = [buf.sample_indices(32, np.random.default_rng(9)) for _ in range(3)]
    b = [buf.sample_indices(32, np.random.default_rng(9)) for _ in range(3)]
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_sample_does_not_mutate():
    buf = ReplayBuffer(5)
    for i in range(7):
        buf.push(exp(i))
    before = list(buf.entries)
    buf.sample(3, np.random.default_rng(1))
    assert buf.entries == before


def test_sample_uniform_chi_square():
    buf = ReplayBuffer(1000)
    for i in range(1000):
        buf.push(exp(i))
    rng = np.random.default_rng(2024)
    counts = np.zeros(1000)
    for _ in range(10_000):
        idx = buf.sample_indices(32, rng)
        assert len(set(idx.tolist())) == 32
        counts[idx] += 1
    assert stats.chisquare(counts).pvalue > 0.001


@given(st.integers(1, 20), st.integers(0, 40))
def test_order_preserved_until_capacity(capacity, n):
    buf = ReplayBuffer(capacity)
    pushed = [exp(i) for i in range(n)]
    for e in pushed:
        buf.push(e)
    assert buf.entries == pushed[-capacity:] if n else buf.entries == []
    assert len(buf) == min(n, capacity)
