from __future__ import annotations

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core import (
    CostMatrix,
    InputError,
    ParameterError,
    exact_expected_makespan,
    fractional_makespan,
    machine_costs,
    social_welfare,
)
from src.lp import lp_mechanism
from src.mechanisms import (
    AlgParams,
    PerTaskMechanism,
    SingleTaskRule,
    alg2,
    alg_n,
    build_mechanism,
    default_params,
    greedy_single,
    min_sec_stats,
    per_task_product,
    proportional_single,
)

declarations = st.lists(st.integers(min_value=1, max_value=40), min_size=2, max_size=6).map(
    lambda values: np.asarray(values, dtype=float) / 4.0
)

instances = st.tuples(st.integers(min_value=2, max_value=4), st.integers(min_value=1, max_value=3)).flatmap(
    lambda shape: st.lists(
        st.lists(st.integers(min_value=1, max_value=40), min_size=shape[1], max_size=shape[1]),
        min_size=shape[0],
        max_size=shape[0],
    )
).map(lambda rows: CostMatrix.of(np.asarray(rows, dtype=float) / 4.0))


class AlgParamsTests(unittest.TestCase):
    def test_rejects_small_L_and_c(self) -> None:
        with self.assertRaises(ParameterError):
            AlgParams(L=4.0, c=2.0, n=3)
        with self.assertRaises(ParameterError):
            AlgParams(L=8.0, c=1.0, n=3)

    def test_default_c_follows_L(self) -> None:
        params = default_params(2)
        self.assertEqual(4.0, params.L)
        self.assertEqual(1.25, params.c)
        self.assertEqual({"L": 12.0, "c": 1.0 + 1.0 / 12.0, "n": 4}, default_params(4).to_dict())


class MinSecStatsTests(unittest.TestCase):
    def test_distinct_values(self) -> None:
        stats = min_sec_stats([1.0, 2.0, 4.0])
        self.assertEqual((1.0, 2.0), (stats.t_min, stats.t_sec))
        self.assertEqual(((0,), (1,)), (stats.N_min, stats.N_sec))

    def test_all_equal(self) -> None:
        stats = min_sec_stats([1.0, 1.0, 1.0])
        self.assertTrue(stats.all_equal)
        self.assertEqual(1.0, stats.t_sec)
        self.assertEqual((0, 1, 2), stats.N_min)

    def test_tied_minimum(self) -> None:
        stats = min_sec_stats([2.0, 1.0, 1.0])
        self.assertEqual((1, 2), stats.N_min)
        self.assertEqual((0,), stats.N_sec)
        self.assertEqual(2.0, stats.t_sec)

    def test_rejects_nonpositive(self) -> None:
        with self.assertRaises(InputError):
            min_sec_stats([1.0, 0.0])


class AnarchyAlgorithmTests(unittest.TestCase):
    def test_two_machine_table(self) -> None:
        params = AlgParams(L=4.0, c=2.0, n=2)
        np.testing.assert_allclose(alg2(params, [1.0, 1.0]), [0.5, 0.5])
        np.testing.assert_allclose(alg2(params, [1.0, 1.5]), [0.25, 0.75])
        np.testing.assert_allclose(alg2(params, [1.0, 4.0]), [15 / 16, 1 / 16])
        np.testing.assert_allclose(alg2(params, [4.0, 1.0]), [1 / 16, 15 / 16])

    def test_two_machine_variant_needs_two_entries(self) -> None:
        with self.assertRaises(InputError):
            alg2(AlgParams(L=4.0, c=2.0, n=2), [1.0, 2.0, 3.0])

    def test_n_machine_table(self) -> None:
        params = AlgParams(L=8.0, c=2.0, n=3)
        np.testing.assert_allclose(alg_n(params, [1.0, 1.0, 1.0]), [1 / 3, 1 / 3, 1 / 3])
        np.testing.assert_allclose(alg_n(params, [1.0, 1.5, 1.5]), [1 / 8, 7 / 16, 7 / 16])
        np.testing.assert_allclose(alg_n(params, [1.0, 2.0, 4.0]), [29 / 32, 1 / 16, 1 / 32])

    def test_third_smallest_gets_nothing_in_middle_case(self) -> None:
        params = AlgParams(L=8.0, c=2.0, n=3)
        np.testing.assert_allclose(alg_n(params, [1.0, 1.5, 1.6]), [1 / 8, 7 / 8, 0.0])

    def test_rejects_wrong_length(self) -> None:
        with self.assertRaises(InputError):
            alg_n(AlgParams(L=8.0, c=2.0, n=3), [1.0, 2.0])

    @settings(max_examples=60, deadline=None)
    @given(declarations)
    def test_probabilities_sum_to_one(self, decl: np.ndarray) -> None:
        probs = alg_n(default_params(decl.size), decl)
        self.assertTrue(np.all(probs >= 0))
        self.assertAlmostEqual(1.0, float(probs.sum()), delta=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(declarations, st.randoms(use_true_random=False))
    def test_permuting_machines_permutes_probabilities(self, decl: np.ndarray, random) -> None:
        params = default_params(decl.size)
        order = list(range(decl.size))
        random.shuffle(order)
        np.testing.assert_allclose(alg_n(params, decl)[order], alg_n(params, decl[order]), atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(declarations, st.integers(min_value=-4, max_value=4))
    def test_scaling_declarations_keeps_probabilities(self, decl: np.ndarray, exponent: int) -> None:
        params = default_params(decl.size)
        np.testing.assert_allclose(alg_n(params, decl), alg_n(params, decl * 2.0**exponent), atol=1e-12)


class BaselineRuleTests(unittest.TestCase):
    def test_proportional(self) -> None:
        np.testing.assert_allclose(proportional_single([1.0, 3.0]), [0.75, 0.25])
        np.testing.assert_allclose(proportional_single([1.0, 1.0]), [0.5, 0.5])
        np.testing.assert_allclose(proportional_single([2.0, 2.0, 2.0]), [1 / 3, 1 / 3, 1 / 3])

    def test_greedy_breaks_ties_by_index(self) -> None:
        self.assertEqual([0.0, 1.0, 0.0], greedy_single([2.0, 1.0, 3.0]).tolist())
        self.assertEqual([1.0, 0.0, 0.0], greedy_single([1.0, 1.0, 3.0]).tolist())
        self.assertEqual([1.0], greedy_single([5.0]).tolist())

    def test_proportional_rejects_zero(self) -> None:
        with self.assertRaises(InputError):
            proportional_single([0.0, 1.0])


class PerTaskProductTests(unittest.TestCase):
    def test_greedy_per_column(self) -> None:
        alloc = per_task_product(greedy_single, CostMatrix.of([[2.0, 1.0], [1.0, 2.0]]))
        self.assertEqual([[0.0, 1.0], [1.0, 0.0]], alloc.to_list())

    def test_two_machine_algorithm_per_column(self) -> None:
        rule = SingleTaskRule("alg2", AlgParams(L=4.0, c=2.0, n=2))
        alloc = per_task_product(rule, CostMatrix.of([[1.0, 1.0], [4.0, 1.0]]))
        np.testing.assert_allclose(alloc.values, [[15 / 16, 0.5], [1 / 16, 0.5]])

    def test_single_column_is_the_rule_itself(self) -> None:
        decl = CostMatrix.from_column([1.0, 3.0, 2.0])
        mechanism = PerTaskMechanism(SingleTaskRule("proportional"))
        np.testing.assert_allclose(mechanism(decl).values[:, 0], proportional_single([1.0, 3.0, 2.0]))

    def test_errors_name_the_task(self) -> None:
        with self.assertRaises(InputError) as ctx:
            per_task_product(proportional_single, CostMatrix.of([[1.0, 0.0], [1.0, 1.0]]))
        self.assertIn("task 1", str(ctx.exception))

    def test_lp_column_rule_matches_proportional_on_one_task(self) -> None:
        decl = [1.0, 3.0, 6.0]
        np.testing.assert_allclose(SingleTaskRule("lp-column")(decl), proportional_single(decl), atol=1e-9)


class RegistryTests(unittest.TestCase):
    def test_builds_every_mechanism(self) -> None:
        decl = CostMatrix.of([[1.0, 2.0], [2.0, 1.0]])
        for name in ("alg2", "algN", "proportional", "greedy", "lp"):
            alloc = build_mechanism(name, n=2)(decl)
            np.testing.assert_allclose(alloc.values.sum(axis=0), [1.0, 1.0], atol=1e-12)

    def test_lp_is_the_relaxation(self) -> None:
        self.assertIs(lp_mechanism, build_mechanism("lp", n=3))

    def test_labels_carry_parameters(self) -> None:
        mechanism = build_mechanism("algN", n=3, params=AlgParams(L=8.0, c=1.125, n=3))
        self.assertEqual("algN(L=8, c=1.125)", mechanism.name)

    @settings(max_examples=80, deadline=None)
    @given(instances)
    def test_objectives_are_sandwiched_for_every_mechanism(self, truth: CostMatrix) -> None:
        names = ("algN", "proportional", "greedy", "lp") + (("alg2",) if truth.n == 2 else ())
        for name in names:
            alloc = build_mechanism(name, n=truth.n)(truth)
            fractional = fractional_makespan(alloc, truth, truth)
            expected = exact_expected_makespan(alloc, truth, truth).value
            welfare = social_welfare(machine_costs(alloc, truth, truth))
            slack = 1e-9 * max(1.0, welfare)
            self.assertLessEqual(fractional, expected + slack, msg=name)
            self.assertLessEqual(expected, truth.n * fractional + slack, msg=name)
            self.assertLessEqual(expected, welfare + slack, msg=name)
            self.assertLessEqual(welfare, truth.n * expected + slack, msg=name)
            if truth.m == 1:
                self.assertAlmostEqual(welfare, expected, delta=slack, msg=name)

    def test_rejects_unknown_and_misfit(self) -> None:
        with self.assertRaises(InputError):
            build_mechanism("vcg", n=2)
        with self.assertRaises(InputError):
            build_mechanism("alg2", n=3)
        with self.assertRaises(ParameterError):
            SingleTaskRule("algN")


if __name__ == "__main__":
    unittest.main()
