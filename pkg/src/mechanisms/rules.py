from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.core import ABS_TOL, AllocationMatrix, CostMatrix, InputError, ParameterError
from src.lp import solve_scheduling_lp

RuleKind = Literal["alg2", "algN", "proportional", "greedy", "lp-column"]
AllocationRule = Callable[[CostMatrix], AllocationMatrix]


@dataclass(slots=True, frozen=True)
class AlgParams:
    """Parameters of the single-task anarchy algorithm: L > 2(n-1) and c > 1."""

    L: float
    c: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"machine count must be at least 1, got {self.n}")
        if not math.isfinite(self.L) or self.L <= 2 * (self.n - 1) or self.L <= 0:
            raise ParameterError(f"L must exceed 2(n-1) = {2 * (self.n - 1)}, got {self.L}")
        if not math.isfinite(self.c) or self.c <= 1:
            raise ParameterError(f"c must exceed 1, got {self.c}")

    @classmethod
    def with_default_c(cls, L: float, n: int) -> AlgParams:
        return cls(L=L, c=1.0 + 1.0 / L, n=n)

    def to_dict(self) -> dict[str, float]:
        return {"L": self.L, "c": self.c, "n": self.n}


def default_params(n: int) -> AlgParams:
    return AlgParams.with_default_c(float(max(4 * (n - 1), 4)), n)


@dataclass(slots=True, frozen=True)
class MinSecStats:
    t_min: float
    t_sec: float
    N_min: tuple[int, ...]
    N_sec: tuple[int, ...]

    @property
    def n_min(self) -> int:
        return len(self.N_min)

    @property
    def n_sec(self) -> int:
        return len(self.N_sec)

    @property
    def all_equal(self) -> bool:
        return not self.N_sec


def _declarations(decl: Sequence[float] | np.ndarray, *, allow_zero: bool = False) -> np.ndarray:
    values = np.asarray(decl, dtype=float).reshape(-1)
    if values.size == 0:
        raise InputError("declaration vector is empty")
    if not np.all(np.isfinite(values)):
        raise InputError("declarations must be finite")
    if allow_zero:
        if np.any(values < 0):
            raise InputError("declarations must be nonnegative")
    elif np.any(values <= 0):
        raise InputError("declarations must be strictly positive")
    return values


def min_sec_stats(decl: Sequence[float] | np.ndarray) -> MinSecStats:
    """Smallest and second-smallest distinct declarations with their index sets (0-based)."""
    values = _declarations(decl)
    t_min = float(values.min())
    at_min = np.abs(values - t_min) <= ABS_TOL
    rest = values[~at_min]
    N_min = tuple(int(i) for i in np.flatnonzero(at_min))
    if rest.size == 0:
        return MinSecStats(t_min=t_min, t_sec=t_min, N_min=N_min, N_sec=())
    t_sec = float(rest.min())
    at_sec = ~at_min & (np.abs(values - t_sec) <= ABS_TOL)
    return MinSecStats(t_min=t_min, t_sec=t_sec, N_min=N_min, N_sec=tuple(int(i) for i in np.flatnonzero(at_sec)))


def alg_n(params: AlgParams, decl: Sequence[float] | np.ndarray) -> np.ndarray:
    values = _declarations(decl)
    n = values.size
    if n != params.n:
        raise InputError(f"declaration vector has {n} entries but parameters are for {params.n} machines")
    stats = min_sec_stats(values)
    if stats.all_equal:
        return np.full(n, 1.0 / n)

    probs = np.zeros(n)
    N_min = list(stats.N_min)
    if stats.t_sec < params.c * stats.t_min - ABS_TOL:
        probs[N_min] = (1.0 / params.L) / stats.n_min
        probs[list(stats.N_sec)] = (1.0 - 1.0 / params.L) / stats.n_sec
        return probs

    others = np.ones(n, dtype=bool)
    others[N_min] = False
    probs[others] = stats.t_min / (params.L * values[others])
    probs[N_min] = (1.0 - math.fsum(probs[others])) / stats.n_min
    return probs


def alg2(params: AlgParams, decl: Sequence[float] | np.ndarray) -> np.ndarray:
    """Two-machine variant; identical to alg_n restricted to n = 2."""
    values = _declarations(decl)
    if values.size != 2 or params.n != 2:
        raise InputError("alg2 schedules a task on exactly two machines")
    return alg_n(params, values)


def proportional_single(decl: Sequence[float] | np.ndarray) -> np.ndarray:
    inverse = 1.0 / _declarations(decl)
    return inverse / math.fsum(inverse)


def greedy_single(decl: Sequence[float] | np.ndarray) -> np.ndarray:
    """All probability on the lowest declaration; ties go to the lowest machine index."""
    values = _declarations(decl, allow_zero=True)
    winner = int(np.flatnonzero(values <= values.min() + ABS_TOL)[0])
    probs = np.zeros(values.size)
    probs[winner] = 1.0
    return probs


@dataclass(slots=True, frozen=True)
class SingleTaskRule:
    kind: RuleKind
    params: AlgParams | None = None

    def __post_init__(self) -> None:
        if self.kind in ("alg2", "algN") and self.params is None:
            raise ParameterError(f"{self.kind} needs AlgParams")

    def __call__(self, decl: Sequence[float] | np.ndarray) -> np.ndarray:
        if self.kind == "alg2":
            assert self.params is not None
            return alg2(self.params, decl)
        if self.kind == "algN":
            assert self.params is not None
            return alg_n(self.params, decl)
        if self.kind == "proportional":
            return proportional_single(decl)
        if self.kind == "greedy":
            return greedy_single(decl)
        if self.kind == "lp-column":
            column = CostMatrix.from_column(_declarations(decl))
            return np.asarray(solve_scheduling_lp(column).alloc.values[:, 0])
        raise InputError(f"unknown single-task rule {self.kind!r}")

    @property
    def label(self) -> str:
        if self.params is None:
            return self.kind
        return f"{self.kind}(L={self.params.L:g}, c={self.params.c:g})"


def per_task_product(rule: Callable[[np.ndarray], np.ndarray], decl: CostMatrix) -> AllocationMatrix:
    """Run a single-task rule independently on every column."""
    columns = []
    for task in range(decl.m):
        try:
            columns.append(np.asarray(rule(decl.column(task)), dtype=float))
        except InputError as exc:
            raise type(exc)(f"task {task}: {exc}") from exc
    return AllocationMatrix(np.stack(columns, axis=1))


@dataclass(slots=True, frozen=True)
class PerTaskMechanism:
    """Task-independent mechanism built from one single-task rule."""

    rule: SingleTaskRule

    def __call__(self, decl: CostMatrix) -> AllocationMatrix:
        return per_task_product(self.rule, decl)

    @property
    def name(self) -> str:
        return self.rule.label
