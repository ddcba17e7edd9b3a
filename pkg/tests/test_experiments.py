from __future__ import annotations

import math
import unittest

import numpy as np

from src.core import AnalysisError, CostMatrix, DomainError, InputError, ParameterError
from src.experiments import (
    EXIT_CODES,
    ExperimentReport,
    ExperimentSettings,
    Measurement,
    analytic_profile,
    appendix_b_instance,
    k14_fast_prob,
    k14_fast_prob_quadrature,
    k14_makespan_lower,
    k14_tight_instance,
    measured_proportional_ratio,
    pivot_grid,
    proportional_ratio,
    reproduce,
    run_multi_task_poa_experiment,
    thm3_instance,
    thm5_instance,
    with_overrides,
)
from src.mechanisms import AlgParams


class InstanceTests(unittest.TestCase):
    def test_shared_fast_machine_instance(self) -> None:
        times = thm3_instance(3, 10.0).values
        self.assertEqual([1.0, 1.0, 1.0], times[0].tolist())
        self.assertEqual([10.0, 1.0, 10.0], times[1].tolist())
        self.assertEqual([10.0, 10.0, 1.0], times[2].tolist())
        with self.assertRaises(ParameterError):
            thm3_instance(3, 9.0)

    def test_sqrt_instance(self) -> None:
        times = appendix_b_instance(4).values
        self.assertEqual([1.0] * 4, times[0].tolist())
        self.assertEqual([2.0] * 4, times[3].tolist())

    def test_diagonal_instances(self) -> None:
        np.testing.assert_allclose(thm5_instance(2, 4.0).values, [[0.25, 1.0], [1.0, 0.25]])
        np.testing.assert_allclose(k14_tight_instance(2, 8.0).values, [[1.0, 8.0], [8.0, 1.0]])
        with self.assertRaises(ParameterError):
            thm5_instance(2, 1.0)


class ProportionalRatioTests(unittest.TestCase):
    def test_closed_form(self) -> None:
        self.assertAlmostEqual(1.8, proportional_ratio(3, 3.0), places=12)
        self.assertAlmostEqual(1.0, proportional_ratio(1, 5.0), places=12)
        self.assertAlmostEqual(2.0, proportional_ratio(2, 1e300), places=9)

    def test_measured_matches_closed_form(self) -> None:
        for m, M in ((2, 2.0), (3, 10.0), (6, 7.5)):
            self.assertAlmostEqual(proportional_ratio(m, M), measured_proportional_ratio(m, M), places=12)

    def test_rejects_small_M(self) -> None:
        with self.assertRaises(ParameterError):
            proportional_ratio(3, 1.0)


class K14Tests(unittest.TestCase):
    def test_closed_form_values(self) -> None:
        self.assertAlmostEqual(15 / 16, k14_fast_prob(2, 8.0), places=14)
        self.assertAlmostEqual(31 / 32, k14_fast_prob(2, 16.0), places=14)
        self.assertEqual(0.5, k14_fast_prob(2, 1.0))

    def test_quadrature_agrees(self) -> None:
        for n, M in ((1, 2.0), (5, 10.0), (30, 27000.0)):
            self.assertAlmostEqual(k14_fast_prob(n, M), k14_fast_prob_quadrature(n, M), delta=1e-10)

    def test_domain(self) -> None:
        with self.assertRaises(DomainError):
            k14_fast_prob(0, 2.0)
        with self.assertRaises(DomainError):
            k14_fast_prob(2, 0.5)

    def test_small_n_bound_is_flagged(self) -> None:
        report = k14_makespan_lower(2)
        self.assertAlmostEqual(31 / 32, report.measured["makespan_lower"].value, places=12)
        self.assertEqual("flagged", report.verdicts["makespan_lower"])
        self.assertEqual("pass", report.verdicts["fast_probability_quadrature"])
        self.assertEqual("flagged", report.status)
        self.assertEqual(5, report.exit_code)
        self.assertTrue(report.notes)

    def test_large_n_tracks_the_asymptote(self) -> None:
        report = k14_makespan_lower(50)
        ratio = report.measured["asymptotic_ratio"].value
        self.assertGreater(ratio, 0.98)
        self.assertLess(ratio, 1.0)
        self.assertEqual("pass", report.verdicts["asymptotic_ratio"])

    def test_tight_instance_optimum_is_one(self) -> None:
        small = k14_makespan_lower(3)
        self.assertEqual(1.0, small.measured["optimal_makespan"].value)
        self.assertEqual("enumeration", small.measured["optimal_makespan"].method)
        self.assertEqual("pass", small.verdicts["optimal_makespan"])
        large = k14_makespan_lower(50)
        self.assertEqual(1.0, large.measured["optimal_makespan"].value)
        self.assertEqual("closed-form", large.measured["optimal_makespan"].method)
        capped = k14_makespan_lower(3, enumeration_cap=10)
        self.assertEqual("closed-form", capped.measured["optimal_makespan"].method)


class ReportTests(unittest.TestCase):
    def test_verdicts_roll_up(self) -> None:
        report = ExperimentReport(name="demo")
        report.judge("a", True)
        self.assertEqual("pass", report.status)
        report.judge("b", False, flag_only=True)
        self.assertEqual("flagged", report.status)
        report.judge("c", False)
        self.assertEqual("fail", report.status)
        self.assertEqual(EXIT_CODES["fail"], report.exit_code)
        self.assertEqual("demo: fail (1 pass, 1 flagged, 1 fail)", report.summary())

    def test_merge_prefixes_keys(self) -> None:
        outer = ExperimentReport(name="outer")
        inner = ExperimentReport(name="inner")
        inner.measure("x", 2.0, "closed-form")
        inner.claim("x", 2.0, "two")
        inner.judge("x", True)
        outer.merge(inner, prefix="n=3")
        self.assertEqual({"n=3.x": "pass"}, outer.verdicts)
        self.assertEqual(2.0, outer.measured["n=3.x"].value)

    def test_monte_carlo_measurements_need_a_seed(self) -> None:
        with self.assertRaises(InputError):
            Measurement(value=1.0, method="monte-carlo")
        payload = Measurement(value=1.0, method="monte-carlo", seed=3, samples=10, stderr=0.1).to_dict()
        self.assertEqual(3, payload["seed"])


class MultiTaskExperimentTests(unittest.TestCase):
    def setUp(self) -> None:
        self.settings = ExperimentSettings(samples=20_000, seed=1)

    def test_shared_fast_machine_reproduction(self) -> None:
        report = reproduce("thm3", self.settings)
        self.assertEqual("pass", report.status, msg=report.to_dict())
        n = 4
        expected = n * (1.0 - (n - 1) / (100.0**2 * 1.01))
        self.assertAlmostEqual(expected, report.measured["machine0_tasks"].value, places=9)
        self.assertGreaterEqual(report.measured["ratio_low"].value, n / 2)
        self.assertEqual(1, report.measured["ratio"].seed)

    def test_sqrt_reproduction(self) -> None:
        report = reproduce("appendixB", self.settings)
        self.assertEqual("pass", report.status, msg=report.to_dict())
        self.assertGreaterEqual(report.measured["ratio_low"].value, 0.9 * math.sqrt(4) / 2)

    def test_non_equilibrium_profile_is_rejected(self) -> None:
        params = AlgParams(L=100.0, c=1.01, n=3)
        instance = thm3_instance(3, 20.0)
        grid = pivot_grid(instance, params, 1.25, 6)
        with self.assertRaises(AnalysisError) as ctx:
            run_multi_task_poa_experiment(params, instance, instance, grid, 1000, 0)
        self.assertIn("not an equilibrium", str(ctx.exception))

    def test_analytic_profile_bids_per_column(self) -> None:
        params = AlgParams(L=100.0, c=1.01, n=3)
        profile = analytic_profile(thm3_instance(3, 20.0), params)
        self.assertEqual([1.0, 1.0, 1.0], profile.values[0].tolist())
        np.testing.assert_allclose(profile.values[1:], 101.0)


class ReproductionTests(unittest.TestCase):
    def test_two_machine_reproduction(self) -> None:
        report = reproduce("thm1")
        self.assertEqual("pass", report.status, msg=report.to_dict())
        self.assertIn("L=4,c=1.25,t=1/2.worst_ratio", report.measured)

    def test_n_machine_reproduction(self) -> None:
        report = reproduce("thm2")
        self.assertEqual("pass", report.status, msg=report.to_dict())
        self.assertTrue(report.verdicts)
        self.assertEqual({"pass"}, set(report.verdicts.values()))
        self.assertIn("t=1/2/3.analytic_regret", report.verdicts)
        self.assertIn("t=1/1/5.analytic_regret", report.verdicts)

    def test_lp_truthfulness_smoke(self) -> None:
        report = reproduce("thm4", ExperimentSettings(trials=3, seed=3))
        self.assertEqual("pass", report.status)
        self.assertLessEqual(report.measured["max_regret"].value, 1e-9)
        self.assertEqual(4, report.inputs["max_m"])

    def test_lp_truthfulness_reproduction_full_trials(self) -> None:
        report = reproduce("thm4", ExperimentSettings(trials=200, seed=7, n=3, m=2))
        self.assertEqual("pass", report.status, msg=report.verdicts)
        self.assertEqual(200, report.inputs["trials"])
        for key in ("max_regret", "fractional_ratio_gap", "randomized_ratio_over_n"):
            self.assertEqual("pass", report.verdicts[key])
        self.assertEqual("enumeration", report.measured["deviation_rows"].method)
        self.assertNotIn("deviation_rows", report.verdicts)
        self.assertGreaterEqual(report.measured["deviation_rows"].value, 200 * 9)

    def test_lp_reproduction_counts_every_deviation_row(self) -> None:
        settings = ExperimentSettings(trials=4, seed=11, n=2, m=2)
        expected = 0
        for trial in range(4):
            rng = np.random.default_rng(np.random.SeedSequence(11, spawn_key=(trial,)))
            n, m = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            expected += n * 9**m
        report = reproduce("thm4", settings)
        self.assertEqual(float(expected), report.measured["deviation_rows"].value)

    def test_proportional_reproduction(self) -> None:
        report = reproduce("thm5", ExperimentSettings(m=3, M=10.0, trials=20))
        self.assertEqual("pass", report.status)
        self.assertAlmostEqual(30 / 12, report.measured["ratio"].value, places=12)
        self.assertAlmostEqual(0.1, report.measured["lp_optimum"].value, places=9)

    def test_greedy_stability_reproduction(self) -> None:
        report = reproduce("thm6", ExperimentSettings(samples=20_000, seed=2))
        self.assertEqual("pass", report.status, msg=report.to_dict())
        self.assertEqual(1.0, report.measured["diagonal.ratio"].value)

    def test_k14_reproduction_is_flagged_not_failed(self) -> None:
        report = reproduce("k14")
        self.assertEqual("flagged", report.status)
        self.assertEqual("pass", report.verdicts["quadrature_sweep_gap"])
        self.assertIn("n=50.asymptotic_ratio", report.verdicts)

    def test_unknown_reproduction(self) -> None:
        with self.assertRaises(InputError):
            reproduce("thm9")

    def test_overrides_skip_missing_values(self) -> None:
        settings = with_overrides(ExperimentSettings(), n=6, M=None)
        self.assertEqual(6, settings.n)
        self.assertIsNone(settings.M)
        self.assertEqual(AlgParams(L=12.0, c=1.0 + 1.0 / 12.0, n=6), settings.params(6, 12.0))


if __name__ == "__main__":
    unittest.main()
