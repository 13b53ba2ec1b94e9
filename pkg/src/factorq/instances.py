"""Benchmark instances: the target functions an episode asks the policy to track.

A piecewise-linear instance is two line segments through fixed endpoints and a
random intermediate point; a sigmoid instance is one logistic curve per action
dimension. Instance sets are immutable and shared read-only across runs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, ParseError, ValidationError

PL_HEADER = "id,x,y,b"

# Domain of the piecewise-linear targets: integer steps 0..9.
PL_T_MAX = 9


@dataclass(frozen=True)
class PLInstance:
    """A 2-segment piecewise-linear target through (0, y0), (x, y), (9, y9).

    ``b = 1`` means increasing endpoints (0,0) -> (9,1); ``b = 0`` means
    decreasing endpoints (0,1) -> (9,0).
    """

    id: int
    x: float
    y: float
    b: int

    def __post_init__(self):
        if not 0.0 <= self.x <= PL_T_MAX:
            raise ValidationError(f"x={self.x} outside [0, {PL_T_MAX}]")
        if not 0.0 <= self.y <= 1.0:
            raise ValidationError(f"y={self.y} outside [0, 1]")
        if self.b not in (0, 1):
            raise ValidationError(f"b={self.b} not a bit")

    @property
    def features(self) -> tuple[float, ...]:
        return (self.x, self.y, float(self.b))


@dataclass(frozen=True)
class SigmoidInstance:
    """Per-dimension logistic curves, parameterized by (shift, slope) pairs."""

    id: int
    shifts: tuple[float, ...]
    slopes: tuple[float, ...]

    def __post_init__(self):
        if len(self.shifts) != len(self.slopes) or not self.shifts:
            raise ValidationError("shifts and slopes must be equal-length, non-empty")

    @property
    def dim(self) -> int:
        return len(self.shifts)

    @property
    def features(self) -> tuple[float, ...]:
        out = []
        for s, k in zip(self.shifts, self.slopes):
            out.extend((s, k))
        return tuple(out)


Instance = PLInstance | SigmoidInstance


class InstanceSet:
    """Ordered, immutable collection of instances with contiguous ids from 0."""

    def __init__(self, instances: Sequence[Instance], label: str = "train"):
        if label not in ("train", "test"):
            raise ValidationError(f"label must be 'train' or 'test', got {label!r}")
        instances = tuple(instances)
        for i, inst in enumerate(instances):
            if inst.id != i:
                raise ValidationError(f"instance ids must be contiguous from 0; position {i} has id {inst.id}")
        self._instances = instances
        self.label = label

    def __len__(self) -> int:
        return len(self._instances)

    def __getitem__(self, i: int) -> Instance:
        return self._instances[i]

    def __iter__(self) -> Iterator[Instance]:
        return iter(self._instances)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InstanceSet)
            and self.label == other.label
            and self._instances == other._instances
        )

    def feature_matrix(self) -> np.ndarray:
        """Instance features stacked row-wise, for vectorized episode batches."""
        return np.array([inst.features for inst in self._instances], dtype=float)


def sample_pl_instance(rng: np.random.Generator, id: int) -> PLInstance:
    """Draw the intermediate point uniformly, then the direction bit fairly."""
    x = rng.uniform(0.0, PL_T_MAX)
    y = rng.uniform(0.0, 1.0)
    b = int(rng.integers(0, 2))
    return PLInstance(id=id, x=x, y=y, b=b)


def sample_sigmoid_instance(rng: np.random.Generator, dim: int, id: int = 0) -> SigmoidInstance:
    """Shifts ~ U[0, 10); slopes are a fair sign times U[0.5, 2.5]."""
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    shifts = []
    slopes = []
    for _ in range(dim):
        shifts.append(rng.uniform(0.0, 10.0))
        sign = 1.0 if rng.integers(0, 2) == 1 else -1.0
        slopes.append(sign * rng.uniform(0.5, 2.5))
    return SigmoidInstance(id=id, shifts=tuple(shifts), slopes=tuple(slopes))


def generate_dataset(
    n: int,
    rng: np.random.Generator,
    label: str = "train",
    kind: str = "pl",
    dim: int = 1,
) -> InstanceSet:
    """Generate ``n`` instances with ids 0..n-1; pure function of (rng state, n)."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if kind == "pl":
        instances = [sample_pl_instance(rng, i) for i in range(n)]
    elif kind == "sigmoid":
        instances = [sample_sigmoid_instance(rng, dim, id=i) for i in range(n)]
    else:
        raise ValidationError(f"unknown benchmark kind {kind!r}")
    return InstanceSet(instances, label=label)


def pl_value(inst: PLInstance, t: int) -> float:
    """Target value at integer step t: interpolation on the segment containing t."""
    if not 0 <= t <= PL_T_MAX:
        raise DomainError(f"t={t} outside [0, {PL_T_MAX}]")
    return float(pl_value_batch(np.array([inst.x]), np.array([inst.y]), np.array([inst.b]), t)[0])


def pl_value_batch(xs: np.ndarray, ys: np.ndarray, bs: np.ndarray, t: int) -> np.ndarray:
    """Vectorized ``pl_value`` over instance feature arrays (shared step t)."""
    if not 0 <= t <= PL_T_MAX:
        raise DomainError(f"t={t} outside [0, {PL_T_MAX}]")
    y0 = np.where(bs == 1, 0.0, 1.0)
    y9 = np.where(bs == 1, 1.0, 0.0)
    # x = 0 degenerates the first segment (pl(0) = y), so those instances fall
    # through to the second segment, which then spans the whole domain.
    with np.errstate(divide="ignore", invalid="ignore"):
        first = y0 + np.where(xs > 0, t / xs, 0.0) * (ys - y0)
        second = ys + np.where(xs < PL_T_MAX, (t - xs) / (PL_T_MAX - xs), 0.0) * (y9 - ys)
    return np.where((t <= xs) & (xs > 0), first, second)


def _fmt(v: float) -> str:
    return "%.17g" % v


def save_instances(instance_set: InstanceSet, path: str | os.PathLike) -> None:
    """Write the set as CSV (LF endings, header row, 17-significant-digit reals)."""
    lines = []
    if len(instance_set) and isinstance(instance_set[0], SigmoidInstance):
        dim = instance_set[0].dim
        cols = [f"shift_{m},slope_{m}" for m in range(1, dim + 1)]
        lines.append("id," + ",".join(cols))
        for inst in instance_set:
            vals = ",".join(_fmt(v) for v in inst.features)
            lines.append(f"{inst.id},{vals}")
    else:
        lines.append(PL_HEADER)
        for inst in instance_set:
            lines.append(f"{inst.id},{_fmt(inst.x)},{_fmt(inst.y)},{inst.b}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def load_instances(path: str | os.PathLike, label: str = "train") -> InstanceSet:
    """Read a CSV written by :func:`save_instances`; the header picks the format."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise ParseError(f"{path}: empty instance file")
    header = raw[0].strip()
    rows = [(i + 2, line) for i, line in enumerate(raw[1:]) if line.strip()]
    if not rows:
        raise ParseError(f"{path}: no instances", line=1)

    instances: list[Instance] = []
    if header == PL_HEADER:
        for lineno, line in rows:
            parts = line.split(",")
            if len(parts) != 4:
                raise ParseError(f"expected 4 fields, got {len(parts)}", line=lineno)
            try:
                inst = PLInstance(id=int(parts[0]), x=float(parts[1]), y=float(parts[2]), b=int(parts[3]))
            except (ValueError, ValidationError) as exc:
                raise ParseError(str(exc), line=lineno) from exc
            instances.append(inst)
    elif header.startswith("id,shift_1,slope_1"):
        n_cols = len(header.split(","))
        if n_cols % 2 != 1:
            raise ParseError("header must hold (shift, slope) pairs", line=1)
        dim = (n_cols - 1) // 2
        for lineno, line in rows:
            parts = line.split(",")
            if len(parts) != n_cols:
                raise ParseError(f"expected {n_cols} fields, got {len(parts)}", line=lineno)
            try:
                vals = [float(p) for p in parts[1:]]
                inst = SigmoidInstance(id=int(parts[0]), shifts=tuple(vals[0::2]), slopes=tuple(vals[1::2]))
            except (ValueError, ValidationError) as exc:
                raise ParseError(str(exc), line=lineno) from exc
            if inst.dim != dim:
                raise ParseError(f"expected {dim} dimensions", line=lineno)
            instances.append(inst)
    else:
        raise ParseError(f"unrecognized header {header!r}", line=1)

    try:
        return InstanceSet(instances, label=label)
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc
