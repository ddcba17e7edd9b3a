from .errors import (
    AnalysisError,
    CapacityError,
    DomainError,
    InputError,
    ParameterError,
    SchedulingError,
    SolverError,
)
from .instance import (
    ABS_TOL,
    DEFAULT_ENUMERATION_CAP,
    AllocationMatrix,
    CostMatrix,
    EffectiveTimes,
    MachineCosts,
    MakespanEstimate,
)
from .objectives import (
    effective_times,
    enumerate_assignments,
    exact_expected_makespan,
    fractional_makespan,
    machine_costs,
    mc_expected_makespan,
    optimal_integral_makespan,
    optimal_social_welfare,
    realized_makespan,
    sample_assignments,
    social_welfare,
)
from .workflow import AnalysisWorkflow, LoggingHook, RouterPort, WorkflowHook

__all__ = [
    "ABS_TOL",
    "DEFAULT_ENUMERATION_CAP",
    "AllocationMatrix",
    "AnalysisError",
    "AnalysisWorkflow",
    "CapacityError",
    "CostMatrix",
    "DomainError",
    "EffectiveTimes",
    "InputError",
    "LoggingHook",
    "MachineCosts",
    "MakespanEstimate",
    "ParameterError",
    "RouterPort",
    "SchedulingError",
    "SolverError",
    "WorkflowHook",
    "effective_times",
    "enumerate_assignments",
    "exact_expected_makespan",
    "fractional_makespan",
    "machine_costs",
    "mc_expected_makespan",
    "optimal_integral_makespan",
    "optimal_social_welfare",
    "realized_makespan",
    "sample_assignments",
    "social_welfare",
]
