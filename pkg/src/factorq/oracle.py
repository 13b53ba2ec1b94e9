"""Exact baselines by brute force.

All of these exploit the fact that instance and step evolve independently of
the actions, so per-step greedy maximization equals full-horizon dynamic
programming. ``value_iteration_equivalence`` verifies on small problems that
splitting a step into per-dimension sub-choices preserves optimal behavior.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .envs import BenchmarkSpec, KIND_PL, grid_predictions, step_reward
from .errors import CapacityError, DomainError
from .instances import Instance, InstanceSet, PLInstance, pl_value

MAX_ENUMERABLE_ACTIONS = 1_000_000
VI_MAX_DIM = 3
VI_MAX_N_ACT = 4
VI_MAX_HORIZON = 5


def _check_enumerable(spec: BenchmarkSpec) -> None:
    if spec.joint_actions > MAX_ENUMERABLE_ACTIONS:
        raise CapacityError(
            f"joint action grid of size {spec.joint_actions} exceeds "
            f"the enumeration limit {MAX_ENUMERABLE_ACTIONS}"
        )


def _step_rewards_grid(spec: BenchmarkSpec, inst: Instance, t: int) -> np.ndarray:
    """Reward of every joint action at step t, indexed by mixed-radix index."""
    if spec.kind == KIND_PL:
        preds = grid_predictions(spec)
        return np.exp(-spec.c * np.abs(preds - pl_value(inst, t)))
    grid = np.indices(spec.n_act).reshape(spec.dim, -1).T
    return np.array([step_reward(spec, inst, t, a) for a in grid])


def optimal_joint_action(spec: BenchmarkSpec, inst: Instance, t: int) -> tuple[tuple[int, ...], float]:
    """Exhaustive argmax of the step reward; ties go to the smallest joint index."""
    _check_enumerable(spec)
    rewards = _step_rewards_grid(spec, inst, t)
    idx = int(np.argmax(rewards))
    action = tuple(int(a) for a in np.unravel_index(idx, spec.n_act))
    return action, float(rewards[idx])


def optimal_episode_reward(spec: BenchmarkSpec, inst: Instance) -> float:
    """Sum of per-step maxima; exact because dynamics are action-independent."""
    _check_enumerable(spec)
    return float(sum(optimal_joint_action(spec, inst, t)[1] for t in range(spec.horizon)))


def optimal_1d_baseline(spec: BenchmarkSpec, inst: PLInstance) -> float:
    """Best episodic reward of a pure one-dimensional predictor.

    Dimensions beyond the first contribute exactly zero to the prediction, so
    the candidate predictions are a1 / (n1 - 1) alone.
    """
    if spec.kind != KIND_PL:
        raise DomainError("the one-dimensional baseline is defined for the pl kind only")
    candidates = np.arange(spec.n_act[0]) / (spec.n_act[0] - 1)
    total = 0.0
    for t in range(spec.horizon):
        errs = np.abs(candidates - pl_value(inst, t))
        total += math.exp(-spec.c * errs.min())
    return total


@dataclass
class BaselineReport:
    """Per-instance optimal and optimal(1D) episodic rewards plus dataset means."""

    instance_ids: list[int]
    optimal: np.ndarray
    optimal_1d: np.ndarray

    @property
    def mean_optimal(self) -> float:
        return float(self.optimal.mean())

    @property
    def mean_optimal_1d(self) -> float:
        return float(self.optimal_1d.mean())

    def to_csv(self, path: str | os.PathLike) -> None:
        lines = ["instance_id,optimal,optimal_1d"]
        for i, o, o1 in zip(self.instance_ids, self.optimal, self.optimal_1d):
            lines.append(f"{i},{o:.17g},{o1:.17g}")
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


def baseline_report(spec: BenchmarkSpec, instance_set: InstanceSet) -> BaselineReport:
    _check_enumerable(spec)
    optimal = np.array([optimal_episode_reward(spec, inst) for inst in instance_set])
    optimal_1d = np.array([optimal_1d_baseline(spec, inst) for inst in instance_set])
    return BaselineReport(
        instance_ids=[inst.id for inst in instance_set],
        optimal=optimal,
        optimal_1d=optimal_1d,
    )


def value_iteration_equivalence(spec: BenchmarkSpec, inst: Instance, gamma: float) -> bool:
    """Exact value iteration on the joint-action MDP and its per-dimension split.

    The split inserts substates holding the actions chosen so far within a
    step; intermediate sub-transitions carry zero reward and no discount, the
    final one carries the step reward and gamma. Returns True iff every base
    state's optimal value matches and the composed per-substate greedy choices
    attain it.
    """
    if spec.dim > VI_MAX_DIM or max(spec.n_act) > VI_MAX_N_ACT or spec.horizon > VI_MAX_HORIZON:
        raise CapacityError(
            f"value-iteration check supports dim <= {VI_MAX_DIM}, "
            f"n_act <= {VI_MAX_N_ACT}, horizon <= {VI_MAX_HORIZON}"
        )
    if not 0.0 <= gamma <= 1.0:
        raise DomainError("gamma must lie in [0, 1]")

    rewards = [_step_rewards_grid(spec, inst, t) for t in range(spec.horizon)]

    # Joint-action value iteration (backward, dynamics are a fixed chain).
    v_joint = np.zeros(spec.horizon + 1)
    greedy_joint_value = np.zeros(spec.horizon)
    for t in reversed(range(spec.horizon)):
        q = rewards[t] + gamma * v_joint[t + 1]
        v_joint[t] = q.max()
        greedy_joint_value[t] = q[int(np.argmax(q))]

    # Sequential split: fold the same q-values one action dimension at a time.
    v_seq = np.zeros(spec.horizon + 1)
    for t in reversed(range(spec.horizon)):
        q = (rewards[t] + gamma * v_seq[t + 1]).reshape(spec.n_act)
        # Value of each partial-action substate, folding the last dimension.
        levels = [q]
        for _ in range(spec.dim):
            levels.append(levels[-1].max(axis=-1))
        v_seq[t] = float(levels[-1])
        # Compose greedy sub-choices (first occurrence on ties) and check that
        # the composed joint action attains the joint optimum.
        composed = []
        for m in range(spec.dim):
            level = levels[spec.dim - 1 - m]  # values after fixing m actions
            sub = level[tuple(composed)]
            composed.append(int(np.argmax(sub)))
        if q[tuple(composed)] != v_joint[t]:
            return False

    return bool(np.array_equal(v_seq, v_joint))
