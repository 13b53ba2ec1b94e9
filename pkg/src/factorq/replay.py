"""Fixed-capacity FIFO experience buffer over base-environment transitions.

One buffer serves all algorithms: it stores the base observation, joint
action, reward, next base observation and terminal flag, and every learner
derives its own view of a sampled batch at update time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ValidationError

DEFAULT_CAPACITY = 2500


@dataclass(frozen=True)
class Transition:
    obs: np.ndarray
    action: tuple[int, ...]
    reward: float
    next_obs: np.ndarray
    done: bool

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Transition)
            and np.array_equal(self.obs, other.obs)
            and self.action == other.action
            and self.reward == other.reward
            and np.array_equal(self.next_obs, other.next_obs)
            and self.done == other.done
        )


@dataclass
class Batch:
    """Column-wise view of sampled transitions."""

    obs: np.ndarray        # (B, obs_len)
    actions: np.ndarray    # (B, dim) int
    rewards: np.ndarray    # (B,)
    next_obs: np.ndarray   # (B, obs_len)
    dones: np.ndarray      # (B,) bool

    def __len__(self) -> int:
        return self.obs.shape[0]


class ReplayBuffer:
    """Ring storage with strictly FIFO eviction and uniform seeded sampling."""

    def __init__(self, capacity: int, obs_len: int, dim: int):
        if capacity < 1:
            raise ValidationError("capacity must be >= 1")
        self.capacity = capacity
        self._obs = np.empty((capacity, obs_len))
        self._actions = np.empty((capacity, dim), dtype=np.int64)
        self._rewards = np.empty(capacity)
        self._next_obs = np.empty((capacity, obs_len))
        self._dones = np.empty(capacity, dtype=bool)
        self._cursor = 0
        self._fill = 0

    def __len__(self) -> int:
        return self._fill

    def push(self, obs: np.ndarray, action, reward: float, next_obs: np.ndarray, done: bool) -> None:
        i = self._cursor
        self._obs[i] = obs
        self._actions[i] = action
        self._rewards[i] = reward
        self._next_obs[i] = next_obs
        self._dones[i] = done
        self._cursor = (i + 1) % self.capacity
        self._fill = min(self._fill + 1, self.capacity)

    def get(self, i: int) -> Transition:
        """Transition i in FIFO age order (0 = oldest stored)."""
        if not 0 <= i < self._fill:
            raise IndexError(i)
        if self._fill == self.capacity:
            i = (self._cursor + i) % self.capacity
        return Transition(
            obs=self._obs[i].copy(),
            action=tuple(int(a) for a in self._actions[i]),
            reward=float(self._rewards[i]),
            next_obs=self._next_obs[i].copy(),
            done=bool(self._dones[i]),
        )

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        """Uniform without replacement within the batch; contents untouched."""
        if batch_size > self._fill:
            raise InsufficientDataError(
                f"buffer holds {self._fill} transitions, batch needs {batch_size}"
            )
        idx = rng.choice(self._fill, size=batch_size, replace=False)
        return Batch(
            obs=self._obs[idx],
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_obs=self._next_obs[idx],
            dones=self._dones[idx],
        )
