from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from src.core import ABS_TOL, CapacityError, CostMatrix, InputError, ParameterError
from src.mechanisms import AlgParams

Candidates = tuple[float, ...]


def _dedupe(preferred: Sequence[float]) -> Candidates:
    """Keep the first of any values within tolerance of each other, then sort."""
    kept: list[float] = []
    for value in preferred:
        if not any(abs(value - other) <= ABS_TOL * max(1.0, abs(other)) for other in kept):
            kept.append(float(value))
    return tuple(sorted(kept))


@dataclass(slots=True, frozen=True)
class BidGrid:
    """Finite candidate declarations, indexed (machine, task)."""

    values: tuple[tuple[Candidates, ...], ...]
    factor: float
    span: int

    def __post_init__(self) -> None:
        if not self.values or not self.values[0]:
            raise InputError("bid grid must cover at least one machine and one task")
        tasks = {len(row) for row in self.values}
        if len(tasks) != 1:
            raise InputError("bid grid rows cover different task counts")
        for row in self.values:
            for candidates in row:
                if not candidates or any(value <= 0 for value in candidates):
                    raise InputError("bid grid candidates must be nonempty and strictly positive")

    @classmethod
    def from_candidates(cls, values: Sequence[Sequence[Sequence[float]]], *, factor: float = 1.0, span: int = 0) -> BidGrid:
        return cls(tuple(tuple(_dedupe(cell) for cell in row) for row in values), factor=factor, span=span)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0])

    def candidates(self, machine: int, task: int) -> Candidates:
        return self.values[machine][task]

    def row_count(self, machine: int) -> int:
        return math.prod(len(cell) for cell in self.values[machine])

    def profile_count(self) -> int:
        return math.prod(self.row_count(machine) for machine in range(self.n))

    def rows(self, machine: int, *, cap: int | None = None) -> Iterator[np.ndarray]:
        """Every full declaration row of ``machine``, last task varying fastest."""
        if cap is not None and self.row_count(machine) > cap:
            raise CapacityError(f"machine {machine} has {self.row_count(machine)} grid rows, cap is {cap}")
        for combo in itertools.product(*self.values[machine]):
            yield np.asarray(combo, dtype=float)

    def contains(self, profile: CostMatrix) -> bool:
        if profile.shape != (self.n, self.m):
            return False
        for machine in range(self.n):
            for task in range(self.m):
                value = float(profile.values[machine, task])
                if not any(abs(value - c) <= ABS_TOL * max(1.0, c) for c in self.candidates(machine, task)):
                    return False
        return True

    def to_dict(self) -> dict[str, object]:
        return {"factor": self.factor, "span": self.span, "values": [[list(cell) for cell in row] for row in self.values]}


def build_grid(
    truth: CostMatrix,
    factor: float,
    span: int,
    pivots: Sequence[float] = (),
    *,
    task_pivots: Sequence[Sequence[float]] | None = None,
) -> BidGrid:
    """Geometric grid t_ij * factor^p for |p| <= span around every true time, plus pivots.

    ``pivots`` land in every cell; ``task_pivots[j]`` only in the cells of task j.
    """
    if not math.isfinite(factor) or factor <= 1:
        raise ParameterError(f"grid factor must exceed 1, got {factor}")
    if span < 1:
        raise ParameterError(f"grid span must be at least 1, got {span}")
    truth.require_positive("true times on a bid grid")
    if task_pivots is not None and len(task_pivots) != truth.m:
        raise InputError(f"task pivots cover {len(task_pivots)} tasks, instance has {truth.m}")
    extra = [float(p) for p in pivots]
    if any(p <= 0 for p in extra):
        raise InputError("grid pivots must be strictly positive")

    exponents = [p for p in range(-span, span + 1) if p != 0]
    cells = []
    for machine in range(truth.n):
        row = []
        for task in range(truth.m):
            t = float(truth.values[machine, task])
            local = list(task_pivots[task]) if task_pivots is not None else []
            row.append(_dedupe([t, *extra, *local, *(t * factor**p for p in exponents)]))
        cells.append(tuple(row))
    return BidGrid(tuple(cells), factor=float(factor), span=int(span))


def single_task_pivots(truth_column: Sequence[float] | np.ndarray, params: AlgParams) -> tuple[float, float, float]:
    """t_min, c*t_min and L*c*t_min: where single-task equilibria of the anarchy algorithm sit."""
    values = np.asarray(truth_column, dtype=float).reshape(-1)
    if values.size == 0 or np.any(values <= 0):
        raise InputError("truth column must be nonempty and strictly positive")
    t_min = float(values.min())
    return (t_min, params.c * t_min, params.L * params.c * t_min)
