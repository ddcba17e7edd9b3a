from __future__ import annotations

import math

import numpy as np

from src.core import CostMatrix, ParameterError


def thm3_instance(n: int, M: float) -> CostMatrix:
    """Column k is fast (time 1) on machine 0 and machine k, slow (time M) everywhere else."""
    if n < 2:
        raise ParameterError(f"need at least two machines, got {n}")
    if M <= n * n:
        raise ParameterError(f"slow time M must exceed n^2 = {n * n}, got {M}")
    times = np.full((n, n), float(M))
    times[0, :] = 1.0
    np.fill_diagonal(times, 1.0)
    return CostMatrix(times)


def appendix_b_instance(n: int) -> CostMatrix:
    """One fast machine with time 1 on every task; the rest take sqrt(n)."""
    if n < 2:
        raise ParameterError(f"need at least two machines, got {n}")
    times = np.full((n, n), math.sqrt(n))
    times[0, :] = 1.0
    return CostMatrix(times)


def thm5_instance(m: int, M: float) -> CostMatrix:
    if m < 1:
        raise ParameterError(f"need at least one task, got {m}")
    if M <= 1:
        raise ParameterError(f"M must exceed 1, got {M}")
    times = np.ones((m, m))
    np.fill_diagonal(times, 1.0 / M)
    return CostMatrix(times)


def k14_tight_instance(n: int, M: float) -> CostMatrix:
    if n < 1:
        raise ParameterError(f"need at least one machine, got {n}")
    if M <= 1:
        raise ParameterError(f"M must exceed 1, got {M}")
    times = np.full((n, n), float(M))
    np.fill_diagonal(times, 1.0)
    return CostMatrix(times)
