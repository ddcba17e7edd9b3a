from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np

from src.core import (
    DEFAULT_ENUMERATION_CAP,
    AnalysisError,
    CostMatrix,
    InputError,
    ParameterError,
    fractional_makespan,
    machine_costs,
    mc_expected_makespan,
    optimal_integral_makespan,
    optimal_social_welfare,
    social_welfare,
)
from src.equilibrium import (
    DEFAULT_PROFILE_CAP,
    BidGrid,
    analytic_equilibrium_single_task,
    build_grid,
    claim_predicates,
    enumerate_pure_equilibria,
    is_pure_equilibrium,
    pos_certificate,
    regret_reports,
    single_task_pivots,
)
from src.lp import lp_approximation_report, lp_truthfulness_regret, random_positive_instance, solve_scheduling_lp
from src.mechanisms import AlgParams, PerTaskMechanism, SingleTaskRule, proportional_single

from .instances import appendix_b_instance, thm3_instance, thm5_instance
from .k14 import k14_makespan_lower, k14_quadrature_sweep
from .reports import ExperimentReport

logger = logging.getLogger("anarchy_sched.experiments")


@dataclass(slots=True, frozen=True)
class ExperimentSettings:
    """Knobs shared by every reproduction; ``None`` means the reproduction's own default."""

    n: int | None = None
    m: int | None = None
    M: float | None = None
    L: float | None = None
    c: float | None = None
    trials: int | None = None
    samples: int = 100_000
    seed: int = 0
    grid_factor: float = 1.25
    grid_span: int = 12
    workers: int = 1
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    profile_cap: int = DEFAULT_PROFILE_CAP

    def params(self, n: int, L: float) -> AlgParams:
        chosen_L = self.L if self.L is not None else L
        chosen_c = self.c if self.c is not None else 1.0 + 1.0 / chosen_L
        return AlgParams(L=chosen_L, c=chosen_c, n=n)


def proportional_ratio(m: int, M: float) -> float:
    """Mm/(M+m-1): proportional's fractional makespan over the optimum on the diagonal instance."""
    if m < 1:
        raise ParameterError(f"m must be at least 1, got {m}")
    if M <= 1:
        raise ParameterError(f"M must exceed 1, got {M}")
    return M * m / (M + m - 1)


def measured_proportional_ratio(m: int, M: float) -> float:
    truth = thm5_instance(m, M)
    alloc = PerTaskMechanism(SingleTaskRule("proportional"))(truth)
    return fractional_makespan(alloc, truth, truth) * M


def analytic_profile(instance: CostMatrix, params: AlgParams) -> CostMatrix:
    """Per-task analytic equilibrium, lowest-index fastest machine as the low bidder in every column."""
    columns = [analytic_equilibrium_single_task(instance.column(task), params).column(0) for task in range(instance.m)]
    return CostMatrix(np.stack(columns, axis=1))


def pivot_grid(instance: CostMatrix, params: AlgParams, factor: float, span: int) -> BidGrid:
    pivots = [single_task_pivots(instance.column(task), params) for task in range(instance.m)]
    return build_grid(instance, factor, span, task_pivots=pivots)


def run_multi_task_poa_experiment(
    params: AlgParams,
    instance: CostMatrix,
    profile: CostMatrix,
    grid: BidGrid,
    samples: int,
    seed: int,
    *,
    workers: int = 1,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    name: str = "multi-task-poa",
) -> ExperimentReport:
    """Confirm ``profile`` is a grid equilibrium of the per-task anarchy algorithm, then estimate its makespan."""
    if profile.shape != instance.shape:
        raise InputError(f"profile {profile.shape} does not match instance {instance.shape}")
    mechanism = PerTaskMechanism(SingleTaskRule("algN", params))
    eps = 1e-9 * float(np.max(instance.values))
    reports = regret_reports(mechanism, instance, profile, grid)
    worst = max(reports, key=lambda report: report.regret)
    if worst.regret > eps:
        raise AnalysisError(
            f"profile is not an equilibrium: machine {worst.machine} saves {worst.regret:.6g} "
            f"by declaring {list(worst.best_deviation)}"
        )

    alloc = mechanism(profile)
    estimate = mc_expected_makespan(alloc, profile, instance, samples, seed, workers=workers)
    optimum, _ = optimal_integral_makespan(instance, cap=enumeration_cap)
    low, high = estimate.interval()

    report = ExperimentReport(
        name=name,
        inputs={"n": instance.n, "m": instance.m, "params": params.to_dict(), "samples": samples, "seed": seed},
    )
    sampling = {"seed": seed, "samples": samples, "stderr": estimate.stderr}
    report.measure("max_regret", worst.regret, "enumeration")
    report.measure("expected_makespan", estimate.value, "monte-carlo", **sampling)
    report.measure("optimal_makespan", optimum, "enumeration")
    report.measure("ratio", estimate.value / optimum, "monte-carlo", **sampling)
    report.measure("ratio_low", low / optimum, "monte-carlo", **sampling)
    report.measure("ratio_high", high / optimum, "monte-carlo", **sampling)
    report.measure("machine0_tasks", math.fsum(alloc.values[0]), "closed-form")
    report.judge("equilibrium", True)
    return report


def _single_task_case(
    truth: tuple[float, ...], params: AlgParams, settings: ExperimentSettings, report: ExperimentReport, key: str
) -> None:
    instance = CostMatrix.from_column(truth)
    rule = PerTaskMechanism(SingleTaskRule("alg2" if len(truth) == 2 else "algN", params))
    grid = pivot_grid(instance, params, settings.grid_factor, settings.grid_span)
    found = enumerate_pure_equilibria(
        rule, instance, grid, profile_cap=settings.profile_cap, enumeration_cap=settings.enumeration_cap
    )
    t_min = min(truth)
    n = len(truth)
    bound = 1.0 + (n - 1) / params.L
    slack = (settings.grid_factor - 1.0) * (1.0 + (n - 1) / params.L)
    analytic = analytic_equilibrium_single_task(truth, params)

    report.measure(f"{key}.equilibria", len(found), "enumeration")
    report.judge(f"{key}.nonempty", len(found) > 0)
    claims_hold = all(
        all(claim_predicates(entry.profile, instance, params, settings.grid_factor).values()) for entry in found
    )
    report.judge(f"{key}.claims", claims_hold)
    report.judge(f"{key}.analytic_equilibrium", is_pure_equilibrium(rule, instance, analytic, grid))
    if not found.entries:
        return
    worst = found.worst()
    ratio = worst.makespan / t_min
    alloc = rule(worst.profile)
    welfare = social_welfare(machine_costs(alloc, worst.profile, instance))
    report.measure(f"{key}.worst_ratio", ratio, "enumeration")
    report.measure(f"{key}.welfare_ratio", welfare / optimal_social_welfare(instance), "enumeration")
    report.claim(
        f"{key}.worst_ratio",
        bound,
        f"every pure equilibrium of the anarchy algorithm on {n} machines has makespan at most 1 + (n-1)/L times optimal",
    )
    report.judge(f"{key}.worst_ratio", ratio <= bound + slack + 1e-12)


def reproduce_thm1(settings: ExperimentSettings) -> ExperimentReport:
    report = ExperimentReport(name="thm1", inputs={"grid_factor": settings.grid_factor, "grid_span": settings.grid_span})
    pairs = [(settings.L, settings.c or 1.0 + 1.0 / settings.L)] if settings.L is not None else [(4.0, 1.25), (10.0, 1.1)]
    for L, c in pairs:
        params = AlgParams(L=L, c=c, n=2)
        for truth in ((1.0, 2.0), (1.0, 10.0), (3.0, 3.0)):
            _single_task_case(truth, params, settings, report, f"L={L:g},c={c:g},t={truth[0]:g}/{truth[1]:g}")
    return report


def reproduce_thm2(settings: ExperimentSettings) -> ExperimentReport:
    params = settings.params(3, 10.0)
    report = ExperimentReport(name="thm2", inputs={"params": params.to_dict(), "grid_factor": settings.grid_factor})
    for truth in ((1.0, 2.0, 3.0), (1.0, 1.0, 5.0)):
        key = "t=" + "/".join(f"{value:g}" for value in truth)
        _single_task_case(truth, params, settings, report, key)
        instance = CostMatrix.from_column(truth)
        grid = pivot_grid(instance, params, settings.grid_factor, settings.grid_span)
        rule = PerTaskMechanism(SingleTaskRule("algN", params))
        regret = max(r.regret for r in regret_reports(rule, instance, analytic_equilibrium_single_task(truth, params), grid))
        report.measure(f"{key}.analytic_regret", regret, "enumeration")
        report.judge(f"{key}.analytic_regret", regret <= 1e-9)
    return report


def reproduce_thm3(settings: ExperimentSettings) -> ExperimentReport:
    n = settings.n or 4
    M = settings.M or float(max(20, n * n + 4))
    params = settings.params(n, 100.0)
    instance = thm3_instance(n, M)
    report = run_multi_task_poa_experiment(
        params,
        instance,
        analytic_profile(instance, params),
        pivot_grid(instance, params, settings.grid_factor, settings.grid_span),
        settings.samples,
        settings.seed,
        workers=settings.workers,
        enumeration_cap=settings.enumeration_cap,
        name="thm3",
    )
    report.inputs["M"] = M
    expected_tasks = n * (1.0 - (n - 1) / (params.L * params.L * params.c))
    report.claim("machine0_tasks", expected_tasks, "the fast shared machine wins each task with probability 1 - (n-1)/(L^2 c)")
    report.judge("machine0_tasks", abs(report.measured["machine0_tasks"].value - expected_tasks) <= 1e-9)
    report.claim("ratio_low", n / 2.0, "anonymous task-independent algorithms have price of anarchy at least n/2 - o(1)")
    report.judge("ratio_low", report.measured["ratio_low"].value >= n / 2.0)
    return report


def reproduce_appendix_b(settings: ExperimentSettings) -> ExperimentReport:
    n = settings.n or 4
    params = settings.params(n, 100.0)
    instance = appendix_b_instance(n)
    report = run_multi_task_poa_experiment(
        params,
        instance,
        analytic_profile(instance, params),
        pivot_grid(instance, params, settings.grid_factor, settings.grid_span),
        settings.samples,
        settings.seed,
        workers=settings.workers,
        enumeration_cap=settings.enumeration_cap,
        name="appendixB",
    )
    target = 0.9 * math.sqrt(n) / 2.0
    report.claim("ratio_low", target, "task-independent algorithms have price of anarchy at least sqrt(n)/2 - o(1)")
    report.judge("ratio_low", report.measured["ratio_low"].value >= target)
    return report


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def reproduce_thm4(settings: ExperimentSettings) -> ExperimentReport:
    trials = settings.trials or 200
    max_n, max_m = settings.n or 4, settings.m or 4
    report = ExperimentReport(
        name="thm4",
        inputs={"trials": trials, "seed": settings.seed, "max_n": max_n, "max_m": max_m, "grid_factor": 1.5, "grid_span": 4},
    )
    worst = -math.inf
    rows = 0
    fractional_gap = 0.0
    randomized_over_n = 0.0
    for trial in range(trials):
        rng = _trial_rng(settings.seed, trial)
        n, m = int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_m + 1))
        truth = random_positive_instance(n, m, rng)
        others = random_positive_instance(n, m, rng)
        grid = build_grid(truth, 1.5, 4)
        for machine in range(n):
            worst = max(worst, lp_truthfulness_regret(truth, others, machine, grid))
            rows += grid.row_count(machine)

        approximation = lp_approximation_report(truth, cap=settings.enumeration_cap)
        ratio = approximation.fractional_ratio
        if ratio is not None:
            gap = abs(ratio - 1.0) if approximation.reference_method == "closed-form" else max(0.0, ratio - 1.0)
            fractional_gap = max(fractional_gap, gap)
        randomized_over_n = max(randomized_over_n, approximation.randomized_ratio / n)

    report.measure("max_regret", worst, "simplex")
    report.claim("max_regret", 0.0, "declaring true execution times is a weakly dominant strategy under the LP mechanism")
    report.judge("max_regret", worst <= 1e-9)
    report.measure("deviation_rows", float(rows), "enumeration")

    report.measure("fractional_ratio_gap", fractional_gap, "simplex")
    report.claim("fractional_ratio_gap", 0.0, "the LP mechanism is optimal for fractional scheduling")
    report.judge("fractional_ratio_gap", fractional_gap <= 1e-9)
    report.measure("randomized_ratio_over_n", randomized_over_n, "enumeration")
    report.claim("randomized_ratio_over_n", 1.0, "read as probabilities, the LP fractions give an n-approximation of the makespan")
    report.judge("randomized_ratio_over_n", randomized_over_n <= 1.0 + 1e-9)
    logger.debug("[experiments] thm4 worst regret over %d trials and %d rows: %r", trials, rows, worst)
    return report


def reproduce_thm5(settings: ExperimentSettings) -> ExperimentReport:
    m = settings.m or 3
    M = settings.M or 10.0
    report = ExperimentReport(name="thm5", inputs={"m": m, "M": M, "seed": settings.seed})
    measured = measured_proportional_ratio(m, M)
    claimed = proportional_ratio(m, M)
    report.measure("ratio", measured, "closed-form")
    report.claim("ratio", claimed, "proportional allocation has fractional approximation ratio Mm/(M+m-1) on the diagonal instance")
    report.judge("ratio", abs(measured - claimed) <= 1e-12 * max(1.0, claimed))

    lp_mu = solve_scheduling_lp(thm5_instance(m, M)).mu
    report.measure("lp_optimum", lp_mu, "simplex")
    report.claim("lp_optimum", 1.0 / M, "the diagonal assignment is optimal with makespan 1/M")
    report.judge("lp_optimum", abs(lp_mu - 1.0 / M) <= 1e-9)

    worst_gap = 0.0
    for trial in range(settings.trials or 100):
        rng = _trial_rng(settings.seed, trial)
        column = random_positive_instance(int(rng.integers(1, 6)), 1, rng).column(0)
        probs = proportional_single(column)
        optimum = 1.0 / math.fsum(1.0 / column)
        worst_gap = max(worst_gap, abs(float(np.max(probs * column)) / optimum - 1.0))
    report.measure("single_task_gap", worst_gap, "closed-form")
    report.claim("single_task_gap", 0.0, "proportional allocation is optimal for fractionally scheduling one task")
    report.judge("single_task_gap", worst_gap <= 1e-12)
    return report


def reproduce_thm6(settings: ExperimentSettings) -> ExperimentReport:
    report = ExperimentReport(name="thm6", inputs={"samples": settings.samples, "seed": settings.seed})
    cases = {
        "two-machine": (CostMatrix.of([[1.0], [3.0]]), (0,)),
        "diagonal": (thm5_instance(3, 10.0), (0, 1, 2)),
    }
    for key, (truth, assignment) in cases.items():
        thresholds = [float(truth.values[machine, task]) for task, machine in enumerate(assignment)]
        grid = build_grid(truth, 2.0, 2, task_pivots=[[1.5 * t] for t in thresholds])
        certificate = pos_certificate(
            truth, assignment, settings.samples, settings.seed, grid, enumeration_cap=settings.enumeration_cap
        )
        report.measure(f"{key}.ratio", certificate.ratio, "enumeration")
        report.measure(
            f"{key}.realized_share",
            min(task.realized_matches / task.samples for task in certificate.tasks),
            "monte-carlo",
            seed=settings.seed,
            samples=settings.samples,
            stderr=0.0,
        )
        report.judge(f"{key}.certificate", certificate.passed)
        if key == "diagonal":
            report.claim(f"{key}.ratio", 1.0, "every integral allocation, the optimal one included, arises at a mixed equilibrium of greedy")
            report.judge(f"{key}.ratio", abs(certificate.ratio - 1.0) <= 1e-12)
    return report


def reproduce_k14(settings: ExperimentSettings) -> ExperimentReport:
    report = k14_makespan_lower(settings.n or 2, enumeration_cap=settings.enumeration_cap)
    gap = k14_quadrature_sweep(50)
    report.measure("quadrature_sweep_gap", gap, "quadrature")
    report.judge("quadrature_sweep_gap", gap <= 1e-10)
    if (settings.n or 2) != 50:
        report.merge(k14_makespan_lower(50, enumeration_cap=settings.enumeration_cap), prefix="n=50")
    return report


REPRODUCTIONS: dict[str, Callable[[ExperimentSettings], ExperimentReport]] = {
    "thm1": reproduce_thm1,
    "thm2": reproduce_thm2,
    "thm3": reproduce_thm3,
    "thm4": reproduce_thm4,
    "thm5": reproduce_thm5,
    "thm6": reproduce_thm6,
    "appendixB": reproduce_appendix_b,
    "k14": reproduce_k14,
}


def reproduce(name: str, settings: ExperimentSettings | None = None) -> ExperimentReport:
    runner = REPRODUCTIONS.get(name)
    if runner is None:
        raise InputError(f"unknown reproduction {name!r}; choose one of {', '.join(REPRODUCTIONS)}")
    return runner(settings or ExperimentSettings())


def with_overrides(settings: ExperimentSettings, **changes: object) -> ExperimentSettings:
    return replace(settings, **{key: value for key, value in changes.items() if value is not None})
