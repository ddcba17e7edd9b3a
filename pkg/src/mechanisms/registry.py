from __future__ import annotations

from typing import Literal, get_args

from src.core import InputError
from src.lp import lp_mechanism

from .rules import AlgParams, AllocationRule, PerTaskMechanism, SingleTaskRule, default_params

MechanismName = Literal["alg2", "algN", "lp", "proportional", "greedy"]
MECHANISM_NAMES: tuple[str, ...] = get_args(MechanismName)


def build_mechanism(name: str, *, n: int, params: AlgParams | None = None) -> AllocationRule:
    """Allocation rule for ``name`` on ``n`` machines; alg2/algN fall back to default parameters."""
    if name == "lp":
        return lp_mechanism
    if name in ("proportional", "greedy"):
        return PerTaskMechanism(SingleTaskRule(name))
    if name in ("alg2", "algN"):
        if name == "alg2" and n != 2:
            raise InputError(f"alg2 needs exactly two machines, instance has {n}")
        return PerTaskMechanism(SingleTaskRule(name, params or default_params(n)))
    raise InputError(f"unknown mechanism {name!r}; choose one of {', '.join(MECHANISM_NAMES)}")
