from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .agent import DQNAgent
from .nn import ConfigurationError
from .replay import Experience, ReplayBuffer
from .supply import EpisodeTrace, SupplyEnv


@dataclass
class EpisodeMetrics:
    episode: int
    mean_reward: float
    total_reward: float
    epsilon: float
    mean_loss: float
    action_counts: np.ndarray
    steps: int
    actions: list = field(default_factory=list)
    trace: EpisodeTrace | None = None
    weekday_action: np.ndarray | None = None  # (7, n_actions) counts, supply runs only


@dataclass
class TrainingReport:
    episodes: list
    agent: DQNAgent
    config: dict = field(default_factory=dict)
    duration: float = 0.0
    seed: int | None = None
    error: str | None = None


@dataclass
class EvaluationSummary:
    mean_reward: float
    episode_rewards: list
    action_counts: np.ndarray
    traces: list = field(default_factory=list)

    @property
    def modal_action(self) -> int:
        return int(np.argmax(self.action_counts))


def _check_dims(env, agent: DQNAgent) -> None:
    if env.state_dim != agent.state_dim:
        raise ConfigurationError(f"env state has {env.state_dim} features, network expects {agent.state_dim}")
    if env.n_actions != agent.config.n_actions:
        raise ConfigurationError(f"env has {env.n_actions} actions, agent has {agent.config.n_actions}")


def _run_episode(env, agent: DQNAgent, rng, index: int, buffer: ReplayBuffer | None):
    """Roll out one episode; trains when ``buffer`` is given, else acts greedily."""
    epsilon = agent.epsilon
    n_actions = agent.config.n_actions
    counts = np.zeros(n_actions, dtype=np.int64)
    is_supply = isinstance(env, SupplyEnv)
    weekday_action = np.zeros((7, n_actions), dtype=np.int64) if is_supply else None
    actions, losses = [], []
    total = 0.0
    state = env.reset(rng)
    done = False
    while not done:
        if is_supply:
            weekday = env.weekday
        action = agent.select_action(state) if buffer is not None else agent.greedy_policy(state)
        next_state, r, done = env.step(action)
        if buffer is not None:
            buffer.push(Experience(state, action, r, next_state, done))
            loss = agent.train_step(buffer)
            if loss is not None:
                losses.append(loss)
        counts[action] += 1
        if is_supply:
            weekday_action[weekday, action] += 1
        actions.append(action)
        total += r
        state = next_state
    steps = len(actions)
    return EpisodeMetrics(
        episode=index,
        mean_reward=total / steps,
        total_reward=total,
        epsilon=epsilon,
        mean_loss=float(np.mean(losses)) if losses else float("nan"),
        action_counts=counts,
        steps=steps,
        actions=actions,
        trace=env.trace() if is_supply else None,
        weekday_action=weekday_action,
    )


def run_training(env_factory, agent: DQNAgent, episodes: int, rng: np.random.Generator,
                 buffer: ReplayBuffer | None = None, config: dict | None = None,
                 seed: int | None = None) -> TrainingReport:
    """Collect experience, train once per step, decay epsilon once per episode.

    A numeric failure stops the run; the report keeps the episodes finished
    so far and records the error.
    """
    if episodes < 0:
        raise ValueError("episodes must be non-negative")
    env = env_factory()
    _check_dims(env, agent)
    if buffer is None:
        buffer = ReplayBuffer(agent.config.replay_capacity)
    report = TrainingReport([], agent, dict(config or {}), seed=seed)
    start = time.perf_counter()
    for k in range(episodes):
        try:
            report.episodes.append(_run_episode(env, agent, rng, k, buffer))
        except FloatingPointError as exc:
            report.error = f"episode {k}: {exc}"
            break
        agent.decay_epsilon()
    report.duration = time.perf_counter() - start
    return report


def evaluate_policy(env_factory, agent: DQNAgent, n_episodes: int,
                    rng: np.random.Generator) -> EvaluationSummary:
    """Greedy rollouts with no replay writes and no training."""
    env = env_factory()
    _check_dims(env, agent)
    counts = np.zeros(agent.config.n_actions, dtype=np.int64)
    rewards, traces = [], []
    total, steps = 0.0, 0
    for k in range(n_episodes):
        m = _run_episode(env, agent, rng, k, None)
        counts += m.action_counts
        rewards.append(m.mean_reward)
        total += m.total_reward
        steps += m.steps
        if m.trace is not None:
            traces.append(m.trace)
    return EvaluationSummary(total / steps if steps else float("nan"), rewards, counts, traces)
