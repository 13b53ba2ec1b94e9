"""Contextual prediction environments over factored discrete action spaces.

Each episode tracks one target-function instance for ``horizon`` steps. The
piecewise-linear benchmark aggregates all action dimensions into a single
prediction through geometrically decaying weights and rewards small prediction
error exponentially; the sigmoid benchmark scores each dimension against its
own curve and multiplies the per-dimension scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, StateError, ValidationError
from .instances import Instance, PLInstance, SigmoidInstance, PL_T_MAX, pl_value, pl_value_batch

KIND_PL = "pl"
KIND_SIGMOID = "sigmoid"
ORDER_DESCENDING = "descending"
ORDER_REVERSED = "reversed"

DEFAULT_REWARD_SHARPNESS = 4.6
DEFAULT_HORIZON = 10


@dataclass(frozen=True)
class BenchmarkSpec:
    """Static description of one benchmark setting.

    ``n_act`` is one entry per action dimension (uniform in all experiments).
    ``lam`` is the geometric importance decay; dimension m carries weight
    lam**(m-1). ``order`` controls only the sequential selection order of
    factored policies, never the prediction aggregation.
    """

    kind: str
    dim: int
    n_act: tuple[int, ...]
    lam: float
    c: float = DEFAULT_REWARD_SHARPNESS
    horizon: int = DEFAULT_HORIZON
    order: str = ORDER_DESCENDING

    def __post_init__(self):
        if self.kind not in (KIND_PL, KIND_SIGMOID):
            raise ValidationError(f"unknown benchmark kind {self.kind!r}")
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if isinstance(self.n_act, int):
            object.__setattr__(self, "n_act", (self.n_act,) * self.dim)
        else:
            object.__setattr__(self, "n_act", tuple(int(n) for n in self.n_act))
        if len(self.n_act) != self.dim:
            raise ValidationError(f"n_act must have {self.dim} entries, got {len(self.n_act)}")
        if any(n < 2 for n in self.n_act):
            raise ValidationError("every action dimension needs at least 2 actions")
        if not 0.0 < self.lam <= 1.0:
            raise ValidationError("lam must lie in (0, 1]")
        if self.c <= 0:
            raise ValidationError("c must be positive")
        if self.horizon < 1:
            raise ValidationError("horizon must be >= 1")
        if self.kind == KIND_PL and self.horizon > PL_T_MAX + 1:
            raise ValidationError(f"pl benchmark supports horizon <= {PL_T_MAX + 1}")
        if self.order not in (ORDER_DESCENDING, ORDER_REVERSED):
            raise ValidationError(f"unknown selection order {self.order!r}")

    @property
    def instance_feature_len(self) -> int:
        return 3 if self.kind == KIND_PL else 2 * self.dim

    @property
    def obs_len(self) -> int:
        """Base observation: remaining steps, instance features, previous actions."""
        return 1 + self.instance_feature_len + self.dim

    @property
    def joint_actions(self) -> int:
        return math.prod(self.n_act)

    def selection_order(self) -> tuple[int, ...]:
        """Dimension indices in the order sequential policies pick them."""
        dims = tuple(range(self.dim))
        return dims if self.order == ORDER_DESCENDING else dims[::-1]

    def validate_action(self, action) -> tuple[int, ...]:
        action = tuple(int(a) for a in action)
        if len(action) != self.dim:
            raise DomainError(f"joint action needs {self.dim} components, got {len(action)}")
        for m, (a, n) in enumerate(zip(action, self.n_act)):
            if not 0 <= a < n:
                raise DomainError(f"action component {m} = {a} outside [0, {n})")
        return action


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool


def weight(spec: BenchmarkSpec, m: int) -> float:
    """Importance weight lam**(m-1) of dimension m, defined for 2 <= m <= dim."""
    if not 2 <= m <= spec.dim:
        raise DomainError(f"m={m} outside [2, {spec.dim}]")
    return spec.lam ** (m - 1)


def aggregate_prediction(spec: BenchmarkSpec, action) -> float:
    """Weighted-sum prediction: dimension 1 spans [0, 1], the rest fine-tune it."""
    action = spec.validate_action(action)
    pred = action[0] / (spec.n_act[0] - 1)
    for m in range(2, spec.dim + 1):
        pred += spec.lam ** (m - 1) * (action[m - 1] / (spec.n_act[m - 1] - 1) - 0.5)
    return pred


def aggregate_prediction_batch(spec: BenchmarkSpec, actions: np.ndarray) -> np.ndarray:
    """Vectorized :func:`aggregate_prediction` over an (N, dim) int array.

    Accumulates per dimension in the same order as the scalar path so both
    agree bit-for-bit.
    """
    pred = actions[:, 0] / (spec.n_act[0] - 1)
    for m in range(2, spec.dim + 1):
        pred = pred + spec.lam ** (m - 1) * (actions[:, m - 1] / (spec.n_act[m - 1] - 1) - 0.5)
    return pred


def grid_predictions(spec: BenchmarkSpec) -> np.ndarray:
    """Predictions of every joint action, indexed by mixed-radix joint index."""
    grid = np.indices(spec.n_act).reshape(spec.dim, -1).T
    return aggregate_prediction_batch(spec, grid)


def pl_reward(spec: BenchmarkSpec, inst: PLInstance, t: int, action) -> float:
    """exp(-c * |prediction - target|); equals 1 only on an exact grid hit."""
    err = abs(aggregate_prediction(spec, action) - pl_value(inst, t))
    return math.exp(-spec.c * err)


def sigmoid_reward(spec: BenchmarkSpec, inst: SigmoidInstance, t: int, action) -> float:
    """Product over dimensions of 1 - |curve_m(t) - a_m / (n_m - 1)|."""
    action = spec.validate_action(action)
    r = 1.0
    for m in range(spec.dim):
        target = 1.0 / (1.0 + math.exp(-inst.slopes[m] * (t - inst.shifts[m])))
        r *= 1.0 - abs(target - action[m] / (spec.n_act[m] - 1))
    return r


def step_reward(spec: BenchmarkSpec, inst: Instance, t: int, action) -> float:
    if spec.kind == KIND_PL:
        return pl_reward(spec, inst, t, action)
    return sigmoid_reward(spec, inst, t, action)


def step_targets_batch(spec: BenchmarkSpec, features: np.ndarray, t: int) -> np.ndarray:
    """Per-instance target values at step t (pl only), from a feature matrix."""
    if spec.kind != KIND_PL:
        raise DomainError("batched targets are defined for the pl kind only")
    return pl_value_batch(features[:, 0], features[:, 1], features[:, 2], t)


def build_sequential_observation(base: np.ndarray, partial) -> np.ndarray:
    """Append the actions already chosen this step; empty partial is a no-op."""
    if len(partial) == 0:
        return base
    tail = np.asarray(partial, dtype=float)
    if base.ndim == 2:
        return np.concatenate([base, tail], axis=1)
    return np.concatenate([base, tail])


@dataclass
class BenchmarkEnv:
    """One exclusively-owned episode runner over a fixed :class:`BenchmarkSpec`."""

    spec: BenchmarkSpec
    _inst: Instance | None = field(default=None, repr=False)
    _t: int = 0
    _prev_actions: tuple[int, ...] = ()

    def _check_instance(self, inst: Instance) -> None:
        if self.spec.kind == KIND_PL and not isinstance(inst, PLInstance):
            raise ValidationError("pl benchmark needs PLInstance inputs")
        if self.spec.kind == KIND_SIGMOID:
            if not isinstance(inst, SigmoidInstance):
                raise ValidationError("sigmoid benchmark needs SigmoidInstance inputs")
            if inst.dim != self.spec.dim:
                raise ValidationError(f"instance has {inst.dim} dimensions, spec has {self.spec.dim}")

    def observation(self) -> np.ndarray:
        obs = np.empty(self.spec.obs_len, dtype=float)
        obs[0] = self.spec.horizon - self._t
        obs[1 : 1 + self.spec.instance_feature_len] = self._inst.features
        obs[1 + self.spec.instance_feature_len :] = self._prev_actions
        return obs

    def reset(self, inst: Instance) -> np.ndarray:
        self._check_instance(inst)
        self._inst = inst
        self._t = 0
        self._prev_actions = (0,) * self.spec.dim
        return self.observation()

    @property
    def done(self) -> bool:
        return self._t >= self.spec.horizon

    def step(self, action) -> StepResult:
        if self._inst is None:
            raise StateError("reset the environment before stepping")
        if self.done:
            raise StateError("episode finished; reset before stepping again")
        action = self.spec.validate_action(action)
        reward = step_reward(self.spec, self._inst, self._t, action)
        self._t += 1
        self._prev_actions = action
        return StepResult(self.observation(), reward, self.done)
