from .claims import CLAIM_NAMES, analytic_equilibrium_single_task, claim_predicates
from .greedy_mixed import (
    DeviationCheck,
    MixedGreedyProfile,
    PosCertificate,
    TaskCertificate,
    greedy_deviation_value,
    greedy_mixed_profile,
    mixed_bid_cdf,
    pos_certificate,
    sample_opponent_bids,
)
from .grid import BidGrid, build_grid, single_task_pivots
from .regret import (
    DEFAULT_PROFILE_CAP,
    EquilibriumEntry,
    EquilibriumSet,
    RegretReport,
    best_response_regret,
    default_eps,
    enumerate_pure_equilibria,
    is_pure_equilibrium,
    pure_poa,
    pure_pos,
    regret_reports,
)

__all__ = [
    "CLAIM_NAMES",
    "DEFAULT_PROFILE_CAP",
    "BidGrid",
    "DeviationCheck",
    "EquilibriumEntry",
    "EquilibriumSet",
    "MixedGreedyProfile",
    "PosCertificate",
    "RegretReport",
    "TaskCertificate",
    "analytic_equilibrium_single_task",
    "best_response_regret",
    "build_grid",
    "claim_predicates",
    "default_eps",
    "enumerate_pure_equilibria",
    "greedy_deviation_value",
    "greedy_mixed_profile",
    "is_pure_equilibrium",
    "mixed_bid_cdf",
    "pos_certificate",
    "pure_poa",
    "pure_pos",
    "regret_reports",
    "sample_opponent_bids",
    "single_task_pivots",
]
