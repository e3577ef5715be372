"""Epsilon-greedy DQN agent trained from replayed minibatches."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import nn
from .nn import ConfigurationError, NetworkParams
from .replay import Experience, NotReady, ReplayBuffer


@dataclass
class AgentConfig:
    n_actions: int
    hidden_sizes: tuple = (32, 32)
    gamma: float = 0.3
    epsilon_start: float = 1.0
    epsilon_decay: float = 0.97
    epsilon_min: float = 0.01
    learning_rate: float = 0.001
    batch_size: int = 32
    target_sync_interval: int = 1
    replay_capacity: int = 10_000

    def __post_init__(self):
        self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)
        if self.n_actions < 1:
            raise ConfigurationError("n_actions must be positive")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigurationError("gamma must lie in [0, 1]")
        for name in ("epsilon_start", "epsilon_min"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1]")
        if not 0.0 < self.epsilon_decay <= 1.0:
            raise ConfigurationError("epsilon_decay must lie in (0, 1]")
        if self.epsilon_min > self.epsilon_start:
            raise ConfigurationError("epsilon_min exceeds epsilon_start")
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        for name in ("batch_size", "target_sync_interval", "replay_capacity"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be a positive integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden_sizes"] = list(self.hidden_sizes)
        return d


@dataclass
class DQNAgent:
    online: NetworkParams
    target: NetworkParams
    config: AgentConfig
    epsilon: float
    rng: np.random.Generator = field(repr=False)
    n_updates: int = 0

    @classmethod
    def create(cls, state_dim: int, config: AgentConfig, seed: int) -> "DQNAgent":
        sizes = [state_dim, *config.hidden_sizes, config.n_actions]
        online = nn.init_network(sizes, seed)
        return cls(online, online.copy(), config, config.epsilon_start,
                   np.random.default_rng([seed, 1]))

    @property
    def state_dim(self) -> int:
        return self.online.n_inputs

    def q_values(self, state) -> np.ndarray:
        return nn.predict(self.online, state)

    def greedy_policy(self, state) -> int:
        # np.argmax returns the first maximum, i.e. the lowest tied index
        return int(np.argmax(self.q_values(state)))

    def select_action(self, state) -> int:
        q = self.q_values(state)
        if self.rng.random() < self.epsilon:
            return int(self.rng.integers(self.config.n_actions))
        return int(np.argmax(q))

    def decay_epsilon(self) -> float:
        self.epsilon = max(self.config.epsilon_min, self.epsilon * self.config.epsilon_decay)
        return self.epsilon

    def compute_targets(self, batch: list[Experience]) -> np.ndarray:
        """Bellman targets ``r + gamma * max_a' Q_target(s', a')``, or ``r`` when terminal."""
        rewards = np.array([e.reward for e in batch], dtype=np.float64)
        terminal = np.array([e.terminal for e in batch], dtype=bool)
        next_q = nn.predict(self.target, np.stack([e.next_state for e in batch]))
        return np.where(terminal, rewards, rewards + self.config.gamma * next_q.max(axis=1))

    def train_step(self, buffer: ReplayBuffer) -> float | None:
        """One Adam step on a sampled minibatch; None while the buffer is too small."""
        rng_state = self.rng.bit_generator.state
        try:
            batch = buffer.sample(self.config.batch_size, self.rng)
        except NotReady:
            return None
        try:
            return self._update(batch)
        except FloatingPointError:
            self.rng.bit_generator.state = rng_state
            raise

    def _update(self, batch: list[Experience]) -> float:
        y = self.compute_targets(batch)
        states = np.stack([e.state for e in batch])
        actions = np.array([e.action for e in batch])
        trace = nn.forward(self.online, states)
        q = trace.activations[-1]
        mask = np.zeros(q.shape, dtype=bool)
        mask[np.arange(len(batch)), actions] = True
        targets = q.copy()
        targets[mask] = y
        loss = float(np.mean((q[mask] - y) ** 2))
        if not np.isfinite(loss):
            raise FloatingPointError(f"non-finite loss {loss}")
        grads = nn.backward(self.online, trace, targets, mask)
        nn.adam_step(self.online, grads, self.config.learning_rate)
        self.n_updates += 1
        if self.n_updates % self.config.target_sync_interval == 0:
            self.target = self.online.snapshot()
        return loss

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "epsilon": self.epsilon,
            "n_updates": self.n_updates,
            "rng_state": self.rng.bit_generator.state,
            "online": self.online.to_dict(),
            "target": self.target.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DQNAgent":
        config = AgentConfig(**d["config"])
        rng = np.random.default_rng()
        rng.bit_generator.state = d["rng_state"]
        agent = cls(NetworkParams.from_dict(d["online"]), NetworkParams.from_dict(d["target"]),
                    config, float(d["epsilon"]), rng, int(d["n_updates"]))
        if agent.online.layer_sizes != agent.target.layer_sizes:
            raise ConfigurationError("online and target networks differ in shape")
        return agent

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "DQNAgent":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
