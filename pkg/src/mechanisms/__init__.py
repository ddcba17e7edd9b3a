from .registry import MECHANISM_NAMES, MechanismName, build_mechanism
from .rules import (
    AlgParams,
    AllocationRule,
    MinSecStats,
    PerTaskMechanism,
    SingleTaskRule,
    alg2,
    alg_n,
    default_params,
    greedy_single,
    min_sec_stats,
    per_task_product,
    proportional_single,
)

__all__ = [
    "MECHANISM_NAMES",
    "AlgParams",
    "AllocationRule",
    "MechanismName",
    "MinSecStats",
    "PerTaskMechanism",
    "SingleTaskRule",
    "alg2",
    "alg_n",
    "build_mechanism",
    "default_params",
    "greedy_single",
    "min_sec_stats",
    "per_task_product",
    "proportional_single",
]
