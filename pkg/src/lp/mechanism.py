from __future__ import annotations

import itertools
import math
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from src.core import (
    DEFAULT_ENUMERATION_CAP,
    AllocationMatrix,
    CapacityError,
    CostMatrix,
    InputError,
    MakespanEstimate,
    ParameterError,
    exact_expected_makespan,
    optimal_integral_makespan,
)

from .solver import solve_scheduling_lp

DEVIATION_ROW_CAP = 10**4


class DeviationGrid(Protocol):
    """Candidate declarations per (machine, task)."""

    def candidates(self, machine: int, task: int) -> tuple[float, ...]: ...


def lp_mechanism(decl: CostMatrix) -> AllocationMatrix:
    """The optimal relaxation fractions, read either as fractions or as probabilities."""
    return solve_scheduling_lp(decl).alloc


def deviation_rows(grid: DeviationGrid, truth: CostMatrix, machine: int, *, cap: int = DEVIATION_ROW_CAP) -> Iterator[np.ndarray]:
    """Every row a machine may declare: the full product of its per-task candidates, last task fastest."""
    per_task = [grid.candidates(machine, task) for task in range(truth.m)]
    count = math.prod(len(values) for values in per_task)
    if count > cap:
        raise CapacityError(f"machine {machine} has {count} deviation rows, cap is {cap}")
    for combo in itertools.product(*per_task):
        yield np.asarray(combo, dtype=float)


def _machine_cost(alloc: AllocationMatrix, decl_row: np.ndarray, truth_row: np.ndarray, machine: int) -> float:
    return math.fsum(alloc.values[machine] * np.maximum(decl_row, truth_row))


def lp_truthfulness_regret(
    truth: CostMatrix,
    decl: CostMatrix,
    machine: int,
    deviation_grid: DeviationGrid,
    *,
    cap: int = DEVIATION_ROW_CAP,
) -> float:
    """Largest cost saving ``machine`` can get by declaring a grid row instead of its true row.

    Other machines keep their rows from ``decl``. A positive value is a violation of
    truthfulness. Raises CapacityError when the machine has more than ``cap`` grid rows.
    """
    if truth.shape != decl.shape:
        raise InputError(f"dimension mismatch: {truth.shape} vs {decl.shape}")
    if not 0 <= machine < truth.n:
        raise InputError(f"machine {machine} outside 0..{truth.n - 1}")
    truth_row = truth.row(machine)
    honest = decl.with_row(machine, truth_row)
    honest_cost = _machine_cost(lp_mechanism(honest), truth_row, truth_row, machine)
    best = honest_cost
    for row in deviation_rows(deviation_grid, truth, machine, cap=cap):
        cost = _machine_cost(lp_mechanism(decl.with_row(machine, row)), row, truth_row, machine)
        best = min(best, cost)
    return honest_cost - best


@dataclass(slots=True, frozen=True)
class LpApproximationReport:
    mu: float
    fractional_reference: float | None
    reference_method: str | None
    expected_makespan: MakespanEstimate
    optimal_integral: float
    machines: int

    @property
    def fractional_ratio(self) -> float | None:
        if self.fractional_reference is None:
            return None
        return self.mu / self.fractional_reference

    @property
    def randomized_ratio(self) -> float:
        return self.expected_makespan.value / self.optimal_integral

    def to_dict(self) -> dict[str, object]:
        return {
            "mu": self.mu,
            "fractional_reference": self.fractional_reference,
            "reference_method": self.reference_method,
            "fractional_ratio": self.fractional_ratio,
            "expected_makespan": self.expected_makespan.to_dict(),
            "optimal_integral": self.optimal_integral,
            "randomized_ratio": self.randomized_ratio,
            "bound": self.machines,
        }


def fractional_optimum_two_machines(truth: CostMatrix, *, steps: int = 200, cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """Grid search over machine-0 fractions for n = 2; an upper bound on the relaxation optimum."""
    if truth.n != 2:
        raise InputError("grid search over fractions covers two machines only")
    if (steps + 1) ** truth.m > cap:
        raise CapacityError(f"{steps + 1}^{truth.m} fraction grid points exceed the cap {cap}")
    levels = np.linspace(0.0, 1.0, steps + 1)
    grid = np.stack(np.meshgrid(*([levels] * truth.m), indexing="ij"), axis=-1).reshape(-1, truth.m)
    first = grid @ truth.values[0]
    second = (1.0 - grid) @ truth.values[1]
    return float(np.min(np.maximum(first, second)))


def lp_approximation_report(truth: CostMatrix, *, cap: int = DEFAULT_ENUMERATION_CAP) -> LpApproximationReport:
    """Compare mu with a fractional reference and the rounded LP allocation with the integral optimum."""
    solution = solve_scheduling_lp(truth)
    reference: float | None = None
    method: str | None = None
    if truth.m == 1:
        reference = 1.0 / math.fsum(1.0 / truth.column(0))
        method = "closed-form"
    elif truth.n == 2 and 201**truth.m <= cap:
        reference = fractional_optimum_two_machines(truth, cap=cap)
        method = "grid-search"
    expected = exact_expected_makespan(solution.alloc, truth, truth, cap=cap)
    optimum, _ = optimal_integral_makespan(truth, cap=cap)
    return LpApproximationReport(
        mu=solution.mu,
        fractional_reference=reference,
        reference_method=method,
        expected_makespan=expected,
        optimal_integral=optimum,
        machines=truth.n,
    )


def random_positive_instance(
    n: int,
    m: int,
    rng: np.random.Generator,
    *,
    low: float = 0.1,
    high: float = 10.0,
) -> CostMatrix:
    """Entries log-uniform on [low, high]."""
    if n < 1 or m < 1:
        raise ParameterError(f"instance needs n, m >= 1, got {n}x{m}")
    if not 0 < low <= high:
        raise ParameterError(f"need 0 < low <= high, got [{low}, {high}]")
    return CostMatrix(np.exp(rng.uniform(math.log(low), math.log(high), size=(n, m))))
