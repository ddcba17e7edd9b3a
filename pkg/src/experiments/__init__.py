from .instances import appendix_b_instance, k14_tight_instance, thm3_instance, thm5_instance
from .k14 import k14_fast_prob, k14_fast_prob_quadrature, k14_makespan_lower, k14_quadrature_sweep
from .reports import EXIT_CODES, Claim, ExperimentReport, Measurement, Verdict
from .runner import (
    REPRODUCTIONS,
    ExperimentSettings,
    analytic_profile,
    measured_proportional_ratio,
    pivot_grid,
    proportional_ratio,
    reproduce,
    run_multi_task_poa_experiment,
    with_overrides,
)

__all__ = [
    "EXIT_CODES",
    "REPRODUCTIONS",
    "Claim",
    "ExperimentReport",
    "ExperimentSettings",
    "Measurement",
    "Verdict",
    "analytic_profile",
    "appendix_b_instance",
    "k14_fast_prob",
    "k14_fast_prob_quadrature",
    "k14_makespan_lower",
    "k14_quadrature_sweep",
    "k14_tight_instance",
    "measured_proportional_ratio",
    "pivot_grid",
    "proportional_ratio",
    "reproduce",
    "run_multi_task_poa_experiment",
    "thm3_instance",
    "thm5_instance",
    "with_overrides",
]
