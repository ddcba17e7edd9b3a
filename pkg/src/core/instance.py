from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InputError

ABS_TOL = 1e-12
DEFAULT_ENUMERATION_CAP = 10**6

EstimateMethod = Literal["exact-enumeration", "monte-carlo"]


def _frozen(values: object, *, name: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float, copy=True)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} must be numeric: {exc}") from exc
    arr.flags.writeable = False
    return arr


@dataclass(slots=True, frozen=True, eq=False)
class CostMatrix:
    """Execution times indexed (machine, task); holds true times and declarations alike."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen(self.values, name="cost matrix")
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"cost matrix must be a non-empty n x m array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("cost matrix entries must be finite")
        if np.any(arr < 0):
            raise InputError("cost matrix entries must be nonnegative")
        object.__setattr__(self, "values", arr)

    @classmethod
    def of(cls, rows: Sequence[Sequence[float]] | np.ndarray) -> CostMatrix:
        return cls(np.asarray(rows, dtype=float))

    @classmethod
    def from_column(cls, column: Sequence[float] | np.ndarray) -> CostMatrix:
        """Single-task instance: one row per machine."""
        return cls(np.asarray(column, dtype=float).reshape(-1, 1))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.m)

    def row(self, machine: int) -> np.ndarray:
        return self.values[machine]

    def column(self, task: int) -> np.ndarray:
        return self.values[:, task]

    def with_row(self, machine: int, row: Sequence[float] | np.ndarray) -> CostMatrix:
        """Declaration matrix after ``machine`` unilaterally replaces its whole row."""
        updated = np.array(self.values, copy=True)
        updated[machine] = np.asarray(row, dtype=float)
        return CostMatrix(updated)

    def require_positive(self, what: str = "execution times") -> None:
        if np.any(self.values <= 0):
            raise InputError(f"{what} must be strictly positive")

    def to_list(self) -> list[list[float]]:
        return self.values.tolist()


@dataclass(slots=True, frozen=True, eq=False)
class AllocationMatrix:
    """Per-task allocation probabilities (or fractions); every column sums to one."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"allocation must be a non-empty n x m array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("allocation entries must be finite")
        if np.any(arr < -ABS_TOL) or np.any(arr > 1 + ABS_TOL):
            raise InputError("allocation entries must lie in [0, 1]")
        arr = np.clip(arr, 0.0, 1.0)
        sums = arr.sum(axis=0)
        bad = np.flatnonzero(np.abs(sums - 1.0) > ABS_TOL)
        if bad.size:
            raise InputError(f"allocation column {int(bad[0])} sums to {sums[bad[0]]!r}, expected 1")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def of(cls, rows: Sequence[Sequence[float]] | np.ndarray) -> AllocationMatrix:
        return cls(np.asarray(rows, dtype=float))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.m)

    def is_integral(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))

    def to_list(self) -> list[list[float]]:
        return self.values.tolist()


@dataclass(slots=True, frozen=True, eq=False)
class EffectiveTimes:
    """Entrywise max of declared and true times: what an allocated machine actually spends."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen(self.values, name="effective times"))


@dataclass(slots=True, frozen=True, eq=False)
class MachineCosts:
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen(self.values, name="machine costs")
        if arr.ndim != 1:
            raise InputError("machine costs must be a vector")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def __getitem__(self, machine: int) -> float:
        return float(self.values[machine])

    def to_list(self) -> list[float]:
        return self.values.tolist()


@dataclass(slots=True, frozen=True)
class MakespanEstimate:
    value: float
    method: EstimateMethod
    samples: int | None = None
    stderr: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.value < 0:
            raise InputError("makespan cannot be negative")
        if self.method == "exact-enumeration":
            if self.stderr is not None or self.samples is not None or self.seed is not None:
                raise InputError("exact estimates carry no sampling metadata")
        elif self.method == "monte-carlo":
            if self.samples is None or self.stderr is None or self.seed is None:
                raise InputError("monte-carlo estimates need samples, stderr and seed")
        else:
            raise InputError(f"unknown estimate method {self.method!r}")

    @property
    def is_exact(self) -> bool:
        return self.method == "exact-enumeration"

    def interval(self, z: float = 1.96) -> tuple[float, float]:
        spread = 0.0 if self.stderr is None else z * self.stderr
        return (self.value - spread, self.value + spread)

    def to_dict(self) -> dict[str, object]:
        payload: dict[str, object] = {"value": self.value, "method": self.method}
        if not self.is_exact:
            payload.update({"samples": self.samples, "stderr": self.stderr, "seed": self.seed})
        return payload
