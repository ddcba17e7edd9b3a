from __future__ import annotations

import unittest
from unittest import mock

import numpy as np
from scipy import optimize

from src.core import (
    CapacityError,
    CostMatrix,
    InputError,
    ParameterError,
    SolverError,
    exact_expected_makespan,
    fractional_makespan,
)
from src.equilibrium import build_grid
from src.lp import (
    deviation_rows,
    fractional_optimum_two_machines,
    lp_approximation_report,
    lp_mechanism,
    lp_truthfulness_regret,
    random_positive_instance,
    solve_scheduling_lp,
)


class FakeGrid:
    def __init__(self, values: tuple[float, ...]) -> None:
        self.values = values
        self.calls: list[tuple[int, int]] = []

    def candidates(self, machine: int, task: int) -> tuple[float, ...]:
        self.calls.append((machine, task))
        return self.values


class SolverExampleTests(unittest.TestCase):
    def test_single_task_balances_two_machines(self) -> None:
        solution = solve_scheduling_lp(CostMatrix.of([[1.0], [3.0]]))
        self.assertAlmostEqual(0.75, solution.mu, places=9)
        self.assertAlmostEqual(0.75, solution.alloc.values[0, 0], places=9)
        self.assertAlmostEqual(0.25, solution.alloc.values[1, 0], places=9)

    def test_single_machine_takes_everything(self) -> None:
        solution = solve_scheduling_lp(CostMatrix.of([[5.0, 2.0]]))
        self.assertAlmostEqual(7.0, solution.mu, places=9)
        self.assertEqual([[1.0, 1.0]], solution.alloc.to_list())

    def test_diagonal_instance(self) -> None:
        times = CostMatrix.of([[1.0, 2.0], [2.0, 1.0]])
        solution = solve_scheduling_lp(times)
        self.assertAlmostEqual(1.0, solution.mu, places=9)
        np.testing.assert_allclose(solution.loads(times), [1.0, 1.0], atol=1e-9)
        np.testing.assert_allclose(solution.alloc.values.sum(axis=0), [1.0, 1.0], atol=1e-12)

    def test_equal_declarations_split_the_work(self) -> None:
        times = CostMatrix.of([[2.0], [2.0]])
        alloc = lp_mechanism(times)
        self.assertAlmostEqual(1.0, solve_scheduling_lp(times).mu, places=9)
        self.assertAlmostEqual(1.0, fractional_makespan(alloc, times, times), places=9)

    def test_rejects_zero_times(self) -> None:
        with self.assertRaises(InputError):
            solve_scheduling_lp(CostMatrix.of([[0.0], [1.0]]))

    def test_iteration_budget_reports_log(self) -> None:
        times = random_positive_instance(3, 3, np.random.default_rng(1))
        with self.assertRaises(SolverError) as ctx:
            solve_scheduling_lp(times, max_iter=1)
        self.assertEqual(1, len(ctx.exception.iteration_log))
        self.assertEqual(1, ctx.exception.iteration_log[0]["phase"])

    def test_solution_is_deterministic(self) -> None:
        times = random_positive_instance(3, 4, np.random.default_rng(2))
        first = solve_scheduling_lp(times)
        second = solve_scheduling_lp(times)
        self.assertEqual(first.mu, second.mu)
        self.assertTrue(np.array_equal(first.alloc.values, second.alloc.values))


class SolverPropertyTests(unittest.TestCase):
    def setUp(self) -> None:
        self.rng = np.random.default_rng(20)

    def test_workload_is_balanced(self) -> None:
        for _ in range(40):
            n, m = int(self.rng.integers(1, 5)), int(self.rng.integers(1, 5))
            times = random_positive_instance(n, m, self.rng)
            solution = solve_scheduling_lp(times)
            np.testing.assert_allclose(solution.loads(times), solution.mu, rtol=1e-9, atol=1e-12)

    def test_mu_is_monotone_in_times(self) -> None:
        for _ in range(30):
            times = random_positive_instance(3, 3, self.rng)
            raised = CostMatrix(times.values * self.rng.uniform(1.0, 2.0, size=times.shape))
            self.assertLessEqual(solve_scheduling_lp(times).mu, solve_scheduling_lp(raised).mu + 1e-9)

    def test_single_task_matches_harmonic_formula(self) -> None:
        for _ in range(20):
            times = random_positive_instance(4, 1, self.rng)
            expected = 1.0 / np.sum(1.0 / times.values)
            self.assertAlmostEqual(expected, solve_scheduling_lp(times).mu, delta=1e-9 * expected)

    def test_two_by_two_matches_fraction_grid(self) -> None:
        for _ in range(10):
            times = random_positive_instance(2, 2, self.rng)
            mu = solve_scheduling_lp(times).mu
            reference = fractional_optimum_two_machines(times)
            self.assertLessEqual(mu, reference + 1e-9)
            self.assertLessEqual(reference - mu, float(times.values.sum()) / 200)

    def test_rounded_allocation_is_within_n_of_mu(self) -> None:
        for _ in range(20):
            times = random_positive_instance(3, 3, self.rng)
            solution = solve_scheduling_lp(times)
            expected = exact_expected_makespan(solution.alloc, times, times).value
            self.assertLessEqual(expected, 3 * solution.mu + 1e-9)


def highs_mu(times: CostMatrix) -> float:
    n, m = times.shape
    objective = np.zeros(n * m + 1)
    objective[-1] = 1.0
    load_rows = np.zeros((n, n * m + 1))
    for machine in range(n):
        load_rows[machine, machine * m : (machine + 1) * m] = times.values[machine]
        load_rows[machine, -1] = -1.0
    task_rows = np.zeros((m, n * m + 1))
    for task in range(m):
        task_rows[task, task : n * m : m] = 1.0
    result = optimize.linprog(
        objective,
        A_ub=load_rows,
        b_ub=np.zeros(n),
        A_eq=task_rows,
        b_eq=np.ones(m),
        bounds=[(0, None)] * (n * m) + [(None, None)],
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    assert result.status == 0, result.message
    return float(result.fun)


class SolverDifferentialTests(unittest.TestCase):
    def test_matches_highs_on_wide_range_instances(self) -> None:
        rng = np.random.default_rng(31)
        for _ in range(150):
            n, m = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            times = random_positive_instance(n, m, rng, low=1e-4, high=1e4)
            expected = highs_mu(times)
            self.assertAlmostEqual(expected, solve_scheduling_lp(times).mu, delta=1e-6 * expected)

    def test_tiny_entries_next_to_huge_ones(self) -> None:
        times = CostMatrix.of(
            [
                [1e-4, 3e3, 2e-3, 9e3, 5e-4],
                [8e3, 2e-4, 7e3, 1e-3, 6e3],
                [4e-4, 5e3, 3e-4, 2e3, 9e-4],
                [1e4, 7e-4, 6e-4, 4e3, 2e-4],
                [3e-3, 1e4, 8e3, 5e-4, 7e3],
                [6e3, 4e-3, 1e-4, 8e3, 3e-4],
            ]
        )
        expected = highs_mu(times)
        solution = solve_scheduling_lp(times)
        self.assertAlmostEqual(expected, solution.mu, delta=1e-6 * expected)
        np.testing.assert_allclose(solution.alloc.values.sum(axis=0), 1.0, atol=1e-9)


class TruthfulnessTests(unittest.TestCase):
    def test_truthful_rows_have_no_profitable_deviation(self) -> None:
        rng = np.random.default_rng(7)
        for _ in range(3):
            truth = random_positive_instance(3, 3, rng)
            grid = build_grid(truth, 1.5, 2)
            for machine in range(truth.n):
                regret = lp_truthfulness_regret(truth, truth, machine, grid)
                self.assertLessEqual(regret, 1e-9 * float(truth.values.max()))

    def test_single_machine_never_gains(self) -> None:
        truth = CostMatrix.of([[2.0, 3.0]])
        grid = build_grid(truth, 2.0, 2)
        self.assertLessEqual(lp_truthfulness_regret(truth, truth, 0, grid), 1e-12)

    def test_other_machines_may_misreport(self) -> None:
        truth = CostMatrix.of([[1.0, 2.0], [2.0, 1.0]])
        decl = CostMatrix.of([[1.0, 2.0], [5.0, 0.5]])
        grid = build_grid(truth, 2.0, 2)
        self.assertLessEqual(lp_truthfulness_regret(truth, decl, 0, grid), 1e-9)

    def test_rejects_unknown_machine(self) -> None:
        truth = CostMatrix.of([[1.0], [2.0]])
        with self.assertRaises(InputError):
            lp_truthfulness_regret(truth, truth, 2, build_grid(truth, 2.0, 1))


class DeviationRowTests(unittest.TestCase):
    def test_small_grid_yields_full_product(self) -> None:
        truth = CostMatrix.of([[1.0, 1.0]])
        rows = list(deviation_rows(FakeGrid((1.0, 2.0, 3.0)), truth, 0))
        self.assertEqual(9, len(rows))
        self.assertEqual([1.0, 1.0], rows[0].tolist())
        self.assertEqual([3.0, 3.0], rows[-1].tolist())

    def test_product_over_cap_raises(self) -> None:
        truth = CostMatrix.of([[1.0, 1.0, 1.0]])
        grid = FakeGrid((1.0, 2.0, 3.0))
        with self.assertRaises(CapacityError):
            list(deviation_rows(grid, truth, 0, cap=26))
        self.assertEqual(27, len(list(deviation_rows(grid, truth, 0, cap=27))))

    def test_regret_searches_the_whole_product(self) -> None:
        truth = CostMatrix.of([[1.0, 2.0, 3.0], [2.0, 1.0, 1.5]])
        grid = build_grid(truth, 1.5, 4)
        rows = len(list(deviation_rows(grid, truth, 0)))
        self.assertEqual(grid.row_count(0), rows)
        self.assertEqual(729, rows)
        with mock.patch("src.lp.mechanism.solve_scheduling_lp", wraps=solve_scheduling_lp) as solver:
            lp_truthfulness_regret(truth, truth, 0, grid)
        self.assertEqual(rows + 1, solver.call_count)

    def test_regret_over_cap_raises(self) -> None:
        truth = CostMatrix.of([[1.0, 2.0, 3.0], [2.0, 1.0, 1.5]])
        with self.assertRaises(CapacityError):
            lp_truthfulness_regret(truth, truth, 0, build_grid(truth, 1.5, 4), cap=100)


class ApproximationReportTests(unittest.TestCase):
    def test_single_task_report(self) -> None:
        report = lp_approximation_report(CostMatrix.of([[1.0], [3.0]]))
        self.assertAlmostEqual(0.75, report.mu, places=9)
        self.assertEqual("closed-form", report.reference_method)
        self.assertAlmostEqual(1.0, report.fractional_ratio, places=9)
        self.assertAlmostEqual(1.5, report.randomized_ratio, places=9)
        self.assertEqual(2, report.to_dict()["bound"])

    def test_larger_instances_have_no_fractional_reference(self) -> None:
        report = lp_approximation_report(CostMatrix.of([[1.0, 2.0], [2.0, 1.0], [1.0, 1.0]]))
        self.assertIsNone(report.fractional_reference)
        self.assertIsNone(report.fractional_ratio)
        self.assertLessEqual(report.randomized_ratio, 3.0 + 1e-9)

    def test_fraction_grid_needs_two_machines(self) -> None:
        with self.assertRaises(InputError):
            fractional_optimum_two_machines(CostMatrix.of([[1.0], [2.0], [3.0]]))


class RandomInstanceTests(unittest.TestCase):
    def test_entries_stay_in_range(self) -> None:
        times = random_positive_instance(4, 5, np.random.default_rng(0), low=0.5, high=2.0)
        self.assertEqual((4, 5), times.shape)
        self.assertTrue(np.all((times.values >= 0.5) & (times.values <= 2.0)))

    def test_rejects_bad_bounds(self) -> None:
        with self.assertRaises(ParameterError):
            random_positive_instance(0, 2, np.random.default_rng(0))
        with self.assertRaises(ParameterError):
            random_positive_instance(2, 2, np.random.default_rng(0), low=3.0, high=1.0)


if __name__ == "__main__":
    unittest.main()
