import numpy as np
import pytest
from scipy import stats

from salesdqn import nn
from salesdqn.agent import AgentConfig, DQNAgent
from salesdqn.nn import ConfigurationError
from salesdqn.replay import Experience, ReplayBuffer


def make_agent(state_dim=2, n_actions=3, seed=0, **kw):
    return DQNAgent.create(state_dim, AgentConfig(n_actions=n_actions, **kw), seed)


def set_output_bias(agent, values):
    """Zero the network and make the output layer a constant."""
    for arr in agent.online.weights + agent.online.biases:
        arr[:] = 0.0
    agent.online.biases[-1][:] = values


def test_greedy_selection():
    agent = make_agent(epsilon_start=0.0, epsilon_min=0.0)
    set_output_bias(agent, [0.1, 0.9, 0.3])
    assert agent.select_action([0.5, 0.5]) == 1
    assert agent.greedy_policy([0.5, 0.5]) == 1


def test_tie_break_lowest_index():
    agent = make_agent(epsilon_start=0.0, epsilon_min=0.0)
    set_output_bias(agent, [0.7, 0.2, 0.7])
    assert agent.select_action([0.0, 0.0]) == 0
    assert agent.greedy_policy([0.0, 0.0]) == 0


def test_full_exploration_is_uniform():
    agent = make_agent(n_actions=8, seed=3)
    assert agent.epsilon == 1.0
    counts = np.bincount([agent.select_action([0.2, 0.4]) for _ in range(10_000)], minlength=8)
    assert stats.chisquare(counts).pvalue > 0.001


def test_select_action_dimension_mismatch():
    agent = make_agent()
    with pytest.raises(ValueError):
        agent.select_action([1.0, 2.0, 3.0])


def test_decay_epsilon():
    agent = make_agent(epsilon_decay=0.97)
    assert agent.decay_epsilon() == pytest.approx(0.97)
    agent = make_agent(epsilon_decay=0.97)
    seq = [agent.decay_epsilon() for _ in range(200)]
    expected = [max(0.01, 0.97 ** k) for k in range(1, 201)]
    np.testing.assert_allclose(seq, expected, rtol=1e-12)
    assert all(b <= a for a, b in zip(seq, seq[1:]))
    assert seq[-1] == 0.01


def test_decay_epsilon_floor():
    agent = make_agent(epsilon_start=0.05, epsilon_min=0.05)
    assert agent.decay_epsilon() == 0.05


def test_config_validation():
    with pytest.raises(ConfigurationError):
        AgentConfig(n_actions=3, epsilon_start=0.01, epsilon_min=0.1)
    with pytest.raises(ConfigurationError):
        AgentConfig(n_actions=3, gamma=1.5)


def test_terminal_target_is_reward():
    agent = make_agent()
    e = Experience(np.zeros(2), 0, 0.4, np.array([5.0, -3.0]), True)
    assert agent.compute_targets([e])[0] == 0.4
    # terminal targets never look at the next state
    e2 = Experience(np.zeros(2), 0, 0.4, np.array([np.nan, 1e300]), True)
    assert agent.compute_targets([e2])[0] == 0.4


def test_gamma_zero_target_is_reward():
    agent = make_agent(gamma=0.0)
    e = Experience(np.zeros(2), 1, 0.25, np.array([1.0, 2.0]), False)
    assert agent.compute_targets([e])[0] == 0.25


def test_target_hand_computed_tiny_net():
    # 1 input -> 1 hidden ReLU unit -> 2 outputs
    agent = DQNAgent.create(1, AgentConfig(n_actions=2, hidden_sizes=(1,), gamma=0.3), 0)
    t = agent.target
    t.weights[0][:] = [[2.0]]
    t.biases[0][:] = [-0.5]
    t.weights[1][:] = [[1.5], [-0.75]]
    t.biases[1][:] = [0.1, 0.2]
    # s' = 0.8: h = relu(2*0.8 - 0.5) = 1.1; q = [1.5*1.1 + 0.1, -0.75*1.1 + 0.2] = [1.75, -0.625]
    e = Experience(np.array([0.0]), 0, 1.0, np.array([0.8]), False)
    assert abs(agent.compute_targets([e])[0] - (1.0 + 0.3 * 1.75)) < 1e-12


def test_targets_permutation_invariant():
    rng = np.random.default_rng(0)
    agent = make_agent(gamma=0.9)
    batch = [Experience(rng.normal(size=2), int(rng.integers(3)), float(rng.normal()),
                        rng.normal(size=2), bool(rng.random() < 0.3)) for _ in range(16)]
    perm = rng.permutation(16)
    y = agent.compute_targets(batch)
    yp = agent.compute_targets([batch[i] for i in perm])
    np.testing.assert_array_equal(y[perm], yp)


def test_train_step_not_ready():
    agent = make_agent(batch_size=4)
    buf = ReplayBuffer(10)
    buf.push(Experience(np.zeros(2), 0, 1.0, np.zeros(2), True))
    before = agent.online.copy()
    state = agent.rng.bit_generator.state
    assert agent.train_step(buf) is None
    assert agent.n_updates == 0 and agent.online.step == 0
    assert agent.rng.bit_generator.state == state
    np.testing.assert_array_equal(agent.online.weights[0], before.weights[0])


def test_train_step_zero_loss_no_change():
    agent = make_agent(batch_size=4, gamma=0.0)
    set_output_bias(agent, [0.5, 0.5, 0.5])
    buf = ReplayBuffer(10)
    for _ in range(4):
        buf.push(Experience(np.array([0.3, 0.1]), 1, 0.5, np.zeros(2), True))
    before = agent.online.copy()
    assert agent.train_step(buf) == 0.0
    for a, b in zip(agent.online.weights + agent.online.biases, before.weights + before.biases):
        np.testing.assert_array_equal(a, b)


def test_train_step_converges_to_terminal_reward():
    agent = make_agent(batch_size=1, gamma=0.7, seed=5)
    buf = ReplayBuffer(4)
    s = np.array([0.4, -0.2])
    buf.push(Experience(s, 2, 1.0, np.array([9.0, 9.0]), True))
    for _ in range(2000):
        agent.train_step(buf)
    assert abs(agent.q_values(s)[2] - 1.0) < 1e-2


def test_target_only_changes_at_sync():
    agent = make_agent(batch_size=2, target_sync_interval=5, gamma=0.9)
    rng = np.random.default_rng(1)
    buf = ReplayBuffer(50)
    for _ in range(20):
        buf.push(Experience(rng.normal(size=2), int(rng.integers(3)), float(rng.normal()),
                            rng.normal(size=2), False))
    probe = buf.entries[:8]
    y0 = agent.compute_targets(probe)
    for k in range(1, 5):
        agent.train_step(buf)
        np.testing.assert_array_equal(agent.compute_targets(probe), y0)
    agent.train_step(buf)
    assert agent.n_updates == 5
    assert not np.array_equal(agent.compute_targets(probe), y0)
    np.testing.assert_array_equal(agent.target.weights[0], agent.online.weights[0])


def test_train_step_nonfinite_preserves_state():
    agent = make_agent(batch_size=1)
    buf = ReplayBuffer(2)
    buf.push(Experience(np.zeros(2), 0, 1e308, np.zeros(2), True))
    agent.online.biases[-1][:] = -1e308
    before = agent.online.copy()
    rng_state = agent.rng.bit_generator.state
    with pytest.raises(FloatingPointError):
        with np.errstate(over="ignore", invalid="ignore"):
            agent.train_step(buf)
    assert agent.n_updates == 0 and agent.online.step == 0
    assert agent.rng.bit_generator.state == rng_state
    for a, b in zip(agent.online.weights + agent.online.biases, before.weights + before.biases):
        np.testing.assert_array_equal(a, b)


def test_agent_roundtrip(tmp_path):
    agent = make_agent(state_dim=9, n_actions=7, hidden_sizes=(64, 64), seed=11)
    agent.epsilon = 0.42
    agent.save(tmp_path / "agent.json")
    back = DQNAgent.load(tmp_path / "agent.json")
    assert back.config == agent.config and back.epsilon == 0.42
    x = np.linspace(0, 1, 9)
    np.testing.assert_array_equal(nn.predict(back.online, x), nn.predict(agent.online, x))
    assert back.rng.random() == agent.rng.random()
