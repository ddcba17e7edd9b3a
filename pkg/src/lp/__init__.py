from .mechanism import (
    DEVIATION_ROW_CAP,
    DeviationGrid,
    LpApproximationReport,
    deviation_rows,
    fractional_optimum_two_machines,
    lp_approximation_report,
    lp_mechanism,
    lp_truthfulness_regret,
    random_positive_instance,
)
from .solver import FEASIBILITY_TOL, LpSolution, solve_scheduling_lp

__all__ = [
    "DEVIATION_ROW_CAP",
    "FEASIBILITY_TOL",
    "DeviationGrid",
    "LpApproximationReport",
    "LpSolution",
    "deviation_rows",
    "fractional_optimum_two_machines",
    "lp_approximation_report",
    "lp_mechanism",
    "lp_truthfulness_regret",
    "random_positive_instance",
    "solve_scheduling_lp",
]
