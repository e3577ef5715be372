from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NotReady(Exception):
    """Raised when the buffer holds fewer entries than the requested batch."""


@dataclass(frozen=True)
class Experience:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool


class ReplayBuffer:
    """Fixed-capacity FIFO of experiences with uniform minibatch sampling.

    Stored as a ring so eviction and indexed access stay O(1).
    """

    def __init__(self, capacity: int = 10_000):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = int(capacity)
        self._data: list[Experience] = []
        self._head = 0  # physical index of the oldest entry once full
        self.n_pushed = 0

    def __len__(self) -> int:
        return len(self._data)

    def __getitem__(self, i: int) -> Experience:
        n = len(self._data)
        if not -n <= i < n:
            raise IndexError(i)
        return self._data[(self._head + i) % n]

    @property
    def entries(self) -> list[Experience]:
        return self._data[self._head:] + self._data[:self._head]

    def push(self, e: Experience) -> None:
        if np.shape(e.state) != np.shape(e.next_state):
            raise ValueError("state and next_state differ in length")
        if not np.isfinite(e.reward):
            raise ValueError("reward must be finite")
        if len(self._data) < self.capacity:
            self._data.append(e)
        else:
            self._data[self._head] = e
            self._head = (self._head + 1) % self.capacity
        self.n_pushed += 1

    def sample_indices(self, batch_size: int, rng: np.random.Generator) -> np.ndarray:
        """Logical indices (0 = oldest), distinct within the batch."""
        n = len(self._data)
        if batch_size < 1:
            raise ValueError("batch_size must be positive")
        if n < batch_size:
            raise NotReady(f"{n} entries, batch of {batch_size} requested")
        return rng.choice(n, size=batch_size, replace=False)

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Experience]:
        return [self[int(i)] for i in self.sample_indices(batch_size, rng)]
