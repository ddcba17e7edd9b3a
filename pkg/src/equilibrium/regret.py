from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from src.core import (
    DEFAULT_ENUMERATION_CAP,
    AnalysisError,
    CapacityError,
    CostMatrix,
    InputError,
    exact_expected_makespan,
    machine_costs,
    optimal_integral_makespan,
)
from src.mechanisms import AllocationRule, PerTaskMechanism

from .grid import BidGrid

logger = logging.getLogger("anarchy_sched.equilibrium")

DEFAULT_PROFILE_CAP = 10**7
EPS_SCALE = 1e-9


def default_eps(truth: CostMatrix) -> float:
    return EPS_SCALE * float(np.max(truth.values))


@dataclass(slots=True, frozen=True)
class RegretReport:
    machine: int
    regret: float
    best_deviation: tuple[float, ...]
    current_cost: float
    best_cost: float

    def to_dict(self) -> dict[str, object]:
        return {
            "machine": self.machine,
            "regret": self.regret,
            "best_deviation": list(self.best_deviation),
            "current_cost": self.current_cost,
            "best_cost": self.best_cost,
        }


def _check_shapes(truth: CostMatrix, profile: CostMatrix, grid: BidGrid) -> None:
    if truth.shape != profile.shape:
        raise InputError(f"dimension mismatch: truth {truth.shape} vs profile {profile.shape}")
    if (grid.n, grid.m) != truth.shape:
        raise InputError(f"bid grid covers {grid.n}x{grid.m}, instance is {truth.n}x{truth.m}")


def _cost(rule: AllocationRule, truth: CostMatrix, decl: CostMatrix, machine: int) -> float:
    return machine_costs(rule(decl), decl, truth)[machine]


def _per_task_best(
    mechanism: PerTaskMechanism, truth: CostMatrix, profile: CostMatrix, machine: int, grid: BidGrid
) -> tuple[float, tuple[float, ...]]:
    """Task-independent rules let each task's declaration be optimised on its own."""
    parts: list[float] = []
    row: list[float] = []
    for task in range(truth.m):
        column = np.array(profile.column(task), copy=True)
        t = float(truth.values[machine, task])
        best_value, best_cost = None, math.inf
        for candidate in grid.candidates(machine, task):
            column[machine] = candidate
            cost = float(mechanism.rule(column)[machine]) * max(candidate, t)
            if cost < best_cost:
                best_value, best_cost = candidate, cost
        assert best_value is not None
        parts.append(best_cost)
        row.append(best_value)
    return math.fsum(parts), tuple(row)


def _exhaustive_best(
    rule: AllocationRule, truth: CostMatrix, profile: CostMatrix, machine: int, grid: BidGrid, cap: int
) -> tuple[float, tuple[float, ...]]:
    best_cost, best_row = math.inf, ()
    for row in grid.rows(machine, cap=cap):
        cost = _cost(rule, truth, profile.with_row(machine, row), machine)
        if cost < best_cost:
            best_cost, best_row = cost, tuple(float(v) for v in row)
    return best_cost, best_row


def best_response_regret(
    rule: AllocationRule,
    truth: CostMatrix,
    profile: CostMatrix,
    machine: int,
    grid: BidGrid,
    *,
    exhaustive: bool = False,
    cap: int = DEFAULT_PROFILE_CAP,
) -> RegretReport:
    """Cost of ``machine`` at ``profile`` minus its cheapest unilateral grid deviation.

    A lone machine faces no competition and always reports zero regret.
    """
    _check_shapes(truth, profile, grid)
    if not 0 <= machine < truth.n:
        raise InputError(f"machine {machine} outside 0..{truth.n - 1}")
    current = _cost(rule, truth, profile, machine)
    if truth.n == 1:
        return RegretReport(machine, 0.0, tuple(float(v) for v in profile.row(machine)), current, current)
    if isinstance(rule, PerTaskMechanism) and not exhaustive:
        best, row = _per_task_best(rule, truth, profile, machine, grid)
    else:
        best, row = _exhaustive_best(rule, truth, profile, machine, grid, cap)
    return RegretReport(machine=machine, regret=current - best, best_deviation=row, current_cost=current, best_cost=best)


def regret_reports(rule: AllocationRule, truth: CostMatrix, profile: CostMatrix, grid: BidGrid) -> list[RegretReport]:
    return [best_response_regret(rule, truth, profile, machine, grid) for machine in range(truth.n)]


def is_pure_equilibrium(
    rule: AllocationRule,
    truth: CostMatrix,
    profile: CostMatrix,
    grid: BidGrid,
    eps: float | None = None,
) -> bool:
    tolerance = default_eps(truth) if eps is None else eps
    return all(report.regret <= tolerance for report in regret_reports(rule, truth, profile, grid))


@dataclass(slots=True, frozen=True)
class EquilibriumEntry:
    profile: CostMatrix
    makespan: float

    def to_dict(self) -> dict[str, object]:
        return {"profile": self.profile.to_list(), "makespan": self.makespan}


@dataclass(slots=True, frozen=True)
class EquilibriumSet:
    entries: tuple[EquilibriumEntry, ...]
    truth: CostMatrix
    grid: BidGrid
    eps: float

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[EquilibriumEntry]:
        return iter(self.entries)

    @property
    def makespans(self) -> list[float]:
        return [entry.makespan for entry in self.entries]

    def worst(self) -> EquilibriumEntry:
        if not self.entries:
            raise AnalysisError("no pure equilibrium on this grid; refine the grid or add pivots")
        return max(self.entries, key=lambda entry: entry.makespan)

    def best(self) -> EquilibriumEntry:
        if not self.entries:
            raise AnalysisError("no pure equilibrium on this grid; refine the grid or add pivots")
        return min(self.entries, key=lambda entry: entry.makespan)

    def to_dict(self) -> dict[str, object]:
        return {"eps": self.eps, "count": len(self.entries), "equilibria": [entry.to_dict() for entry in self.entries]}


def _cost_tensor(rule: AllocationRule, truth: CostMatrix, rows: list[list[np.ndarray]]) -> np.ndarray:
    shape = tuple(len(options) for options in rows)
    costs = np.empty(shape + (truth.n,))
    for index in np.ndindex(*shape):
        decl = CostMatrix(np.stack([rows[machine][choice] for machine, choice in enumerate(index)]))
        costs[index] = machine_costs(rule(decl), decl, truth).values
    return costs


def enumerate_pure_equilibria(
    rule: AllocationRule,
    truth: CostMatrix,
    grid: BidGrid,
    eps: float | None = None,
    *,
    profile_cap: int = DEFAULT_PROFILE_CAP,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> EquilibriumSet:
    """Every grid profile where no machine gains more than ``eps`` by switching rows.

    The rule is evaluated once per profile; a machine's regret at a profile is its
    cost there minus the minimum over its own axis of the cost tensor.
    """
    if (grid.n, grid.m) != truth.shape:
        raise InputError(f"bid grid covers {grid.n}x{grid.m}, instance is {truth.n}x{truth.m}")
    total = grid.profile_count()
    if total > profile_cap:
        raise CapacityError(f"{total} grid profiles exceed the profile cap {profile_cap}; shrink the grid span")
    tolerance = default_eps(truth) if eps is None else eps
    rows = [list(grid.rows(machine)) for machine in range(truth.n)]
    logger.debug("[equilibrium] evaluating %d profiles", total)
    costs = _cost_tensor(rule, truth, rows)

    stable = np.ones(costs.shape[:-1], dtype=bool)
    if truth.n > 1:
        for machine in range(truth.n):
            own = costs[..., machine]
            stable &= own - own.min(axis=machine, keepdims=True) <= tolerance

    entries = []
    for index in zip(*np.nonzero(stable)):
        decl = CostMatrix(np.stack([rows[machine][choice] for machine, choice in enumerate(index)]))
        value = exact_expected_makespan(rule(decl), decl, truth, cap=enumeration_cap).value
        entries.append(EquilibriumEntry(profile=decl, makespan=value))
    logger.debug("[equilibrium] %d of %d profiles are equilibria", len(entries), total)
    return EquilibriumSet(entries=tuple(entries), truth=truth, grid=grid, eps=tolerance)


def pure_poa(
    rule: AllocationRule,
    truth: CostMatrix,
    grid: BidGrid,
    eps: float | None = None,
    *,
    equilibria: EquilibriumSet | None = None,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Worst grid-equilibrium makespan over the optimal integral makespan."""
    found = equilibria if equilibria is not None else enumerate_pure_equilibria(
        rule, truth, grid, eps, enumeration_cap=enumeration_cap
    )
    optimum, _ = optimal_integral_makespan(truth, cap=enumeration_cap)
    return found.worst().makespan / optimum


def pure_pos(
    rule: AllocationRule,
    truth: CostMatrix,
    grid: BidGrid,
    eps: float | None = None,
    *,
    equilibria: EquilibriumSet | None = None,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Best grid-equilibrium makespan over the optimal integral makespan."""
    found = equilibria if equilibria is not None else enumerate_pure_equilibria(
        rule, truth, grid, eps, enumeration_cap=enumeration_cap
    )
    optimum, _ = optimal_integral_makespan(truth, cap=enumeration_cap)
    return found.best().makespan / optimum
