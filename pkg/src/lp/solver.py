from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from src.core import AllocationMatrix, CostMatrix, InputError, SolverError

logger = logging.getLogger("anarchy_sched.lp")

FEASIBILITY_TOL = 1e-9


@dataclass(slots=True, frozen=True)
class LpSolution:
    """Optimal fractions alpha and makespan mu of the scheduling relaxation."""

    alloc: AllocationMatrix
    mu: float
    iterations: int = 0

    def loads(self, times: CostMatrix) -> np.ndarray:
        return np.sum(self.alloc.values * times.values, axis=1)

    def to_dict(self) -> dict[str, object]:
        return {"mu": self.mu, "alloc": self.alloc.to_list(), "iterations": self.iterations}


@dataclass(slots=True)
class _Tableau:
    """Dense simplex tableau; the last row holds reduced costs and -objective."""

    table: np.ndarray
    basis: list[int]
    log: list[dict[str, object]]
    max_iter: int
    tol: float = FEASIBILITY_TOL

    @property
    def rows(self) -> int:
        return self.table.shape[0] - 1

    def pivot(self, row: int, col: int) -> None:
        self.table[row] /= self.table[row, col]
        factors = self.table[:, col].copy()
        factors[row] = 0.0
        self.table -= np.outer(factors, self.table[row])
        self.basis[row] = col

    def run(self, phase: int, columns: int) -> None:
        """Bland's rule: lowest entering index, ratio ties broken by lowest basic index."""
        while True:
            reduced = self.table[-1, :columns]
            candidates = np.flatnonzero(reduced < -self.tol)
            if candidates.size == 0:
                return
            if len(self.log) >= self.max_iter:
                raise SolverError(
                    f"simplex did not converge within {self.max_iter} pivots",
                    iteration_log=self.log,
                )
            col = int(candidates[0])
            column = self.table[: self.rows, col]
            eligible = np.flatnonzero(column > self.tol)
            if eligible.size == 0:
                raise SolverError(f"phase {phase} is unbounded in column {col}", iteration_log=self.log)
            ratios = self.table[eligible, -1] / column[eligible]
            tied = eligible[ratios <= ratios.min() + self.tol]
            row = int(min(tied, key=lambda r: self.basis[r]))
            leaving = self.basis[row]
            self.pivot(row, col)
            entry = {"phase": phase, "entering": col, "leaving": leaving, "objective": float(-self.table[-1, -1])}
            self.log.append(entry)
            logger.debug("[lp] pivot %d %s", len(self.log), entry)

    def drop_artificials(self, first_artificial: int) -> None:
        """Drive basic artificials out of the basis; rows that cannot be pivoted are redundant."""
        keep_rows: list[int] = []
        for row in range(self.rows):
            if self.basis[row] < first_artificial:
                keep_rows.append(row)
                continue
            nonzero = np.flatnonzero(np.abs(self.table[row, :first_artificial]) > self.tol)
            if nonzero.size:
                self.pivot(row, int(nonzero[0]))
                keep_rows.append(row)
        body = self.table[keep_rows + [self.rows]]
        self.table = np.hstack([body[:, :first_artificial], body[:, -1:]])
        self.basis = [self.basis[row] for row in keep_rows]

    def price(self, cost: np.ndarray) -> None:
        self.table[-1, :] = 0.0
        self.table[-1, : cost.size] = cost
        for row, var in enumerate(self.basis):
            if cost[var] != 0.0:
                self.table[-1] -= cost[var] * self.table[row]

    def solution(self, size: int) -> np.ndarray:
        x = np.zeros(size)
        for row, var in enumerate(self.basis):
            if var < size:
                x[var] = self.table[row, -1]
        return x


def _simplex_standard_form(
    cost: np.ndarray,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    *,
    tol: float = FEASIBILITY_TOL,
    max_iter: int | None = None,
) -> tuple[np.ndarray, int]:
    """Minimise cost @ x subject to A_eq x = b_eq, x >= 0 (b_eq >= 0) by two-phase simplex."""
    rows, columns = A_eq.shape
    budget = max_iter if max_iter is not None else 50 * (rows + columns)
    table = np.zeros((rows + 1, columns + rows + 1))
    table[:rows, :columns] = A_eq
    table[:rows, columns : columns + rows] = np.eye(rows)
    table[:rows, -1] = b_eq
    tableau = _Tableau(table=table, basis=list(range(columns, columns + rows)), log=[], max_iter=budget, tol=tol)

    phase_one = np.zeros(columns + rows)
    phase_one[columns:] = 1.0
    tableau.price(phase_one)
    tableau.run(phase=1, columns=columns + rows)
    infeasibility = float(-tableau.table[-1, -1])
    if infeasibility > tol * max(1.0, float(np.max(b_eq))):
        raise SolverError(f"relaxation infeasible (phase 1 residual {infeasibility:g})", iteration_log=tableau.log)

    tableau.drop_artificials(columns)
    tableau.price(np.asarray(cost, dtype=float))
    tableau.run(phase=2, columns=columns)
    return tableau.solution(columns), len(tableau.log)


def solve_scheduling_lp(times: CostMatrix, *, max_iter: int | None = None) -> LpSolution:
    """Minimise mu subject to every task fully allocated and every machine load at most mu.

    Variables are alpha (row-major, index i*m + j), then mu, then one surplus per
    machine turning ``mu - sum_j t_ij alpha_ij >= 0`` into an equality. Times are
    divided by U = sum_j min_i t_ij before solving, which puts the scaled optimum in
    [1/n, 1] whatever the spread of the inputs; mu is scaled back afterwards.
    """
    times.require_positive("LP execution times")
    n, m = times.shape
    scale = math.fsum(np.min(times.values, axis=0))
    scaled = times.values / scale

    mu_index = n * m
    columns = n * m + 1 + n
    A_eq = np.zeros((m + n, columns))
    b_eq = np.zeros(m + n)
    for task in range(m):
        A_eq[task, [i * m + task for i in range(n)]] = 1.0
        b_eq[task] = 1.0
    for machine in range(n):
        row = m + machine
        A_eq[row, machine * m : (machine + 1) * m] = -scaled[machine]
        A_eq[row, mu_index] = 1.0
        A_eq[row, mu_index + 1 + machine] = -1.0

    cost = np.zeros(columns)
    cost[mu_index] = 1.0
    x, iterations = _simplex_standard_form(cost, A_eq, b_eq, max_iter=max_iter)

    alpha = np.clip(x[:mu_index].reshape(n, m), 0.0, None)
    sums = alpha.sum(axis=0)
    if np.any(sums <= 0):
        raise SolverError("solver returned an unallocated task")
    alpha = alpha / sums
    mu = float(x[mu_index]) * scale
    logger.debug("[lp] solved %dx%d in %d pivots, mu=%r", n, m, iterations, mu)
    try:
        alloc = AllocationMatrix(alpha)
    except InputError as exc:
        raise SolverError(f"solver returned an invalid allocation: {exc}") from exc
    return LpSolution(alloc=alloc, mu=mu, iterations=iterations)
