from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.core import ABS_TOL, CostMatrix, InputError
from src.mechanisms import AlgParams, min_sec_stats

CLAIM_NAMES = ("min_ratio", "no_underbid", "unique_min", "min_bid_formula", "order_preserved")


def _vector(values: CostMatrix | Sequence[float] | np.ndarray, *, what: str) -> np.ndarray:
    if isinstance(values, CostMatrix):
        if values.m != 1:
            raise InputError(f"{what} must describe a single task, got {values.m} tasks")
        return np.asarray(values.column(0), dtype=float)
    return np.asarray(values, dtype=float).reshape(-1)


def analytic_equilibrium_single_task(truth: CostMatrix | Sequence[float] | np.ndarray, params: AlgParams) -> CostMatrix:
    """The fastest machine (lowest index among ties) bids its true time; everyone else bids max(L*c*t_min, t_k)."""
    t = _vector(truth, what="truth")
    if t.size == 0 or np.any(t <= 0):
        raise InputError("true times must be nonempty and strictly positive")
    winner = int(np.argmin(t))
    t_min = float(t[winner])
    bids = np.maximum(params.L * params.c * t_min, t)
    bids[winner] = t_min
    return CostMatrix.from_column(bids)


def claim_predicates(
    profile: CostMatrix | Sequence[float] | np.ndarray,
    truth: CostMatrix | Sequence[float] | np.ndarray,
    params: AlgParams,
    grid_factor: float = 1.0,
) -> dict[str, bool]:
    """Structural properties every single-task equilibrium of the anarchy algorithm has.

    Only ``min_bid_formula`` is an equality; it is accepted within one grid step
    (a factor of ``grid_factor`` either way). The rest compare exactly.
    ``no_underbid`` only covers machines outside the lowest-bid set.
    """
    bids = _vector(profile, what="profile")
    t = _vector(truth, what="truth")
    if bids.shape != t.shape:
        raise InputError(f"profile has {bids.size} bids for {t.size} machines")
    stats = min_sec_stats(bids)
    bidder = stats.N_min[0]

    if stats.all_equal or bids.size == 1:
        min_ratio = bids.size == 1
        target = float(t[bidder])
    else:
        min_ratio = stats.t_sec >= params.c * stats.t_min - ABS_TOL
        target = min(float(t[bidder]), stats.t_sec / params.c)
    step = max(grid_factor, 1.0)
    outside = np.ones(bids.size, dtype=bool)
    outside[list(stats.N_min)] = False

    return {
        "min_ratio": bool(min_ratio),
        "no_underbid": bool(np.all(bids[outside] >= t[outside] - ABS_TOL)),
        "unique_min": stats.n_min == 1,
        "min_bid_formula": bool(target / step - ABS_TOL <= stats.t_min <= target * step + ABS_TOL),
        "order_preserved": bool(abs(float(t[bidder]) - float(t.min())) <= ABS_TOL),
    }
