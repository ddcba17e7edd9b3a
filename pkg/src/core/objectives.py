from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import CapacityError, InputError
from .instance import (
    ABS_TOL,
    DEFAULT_ENUMERATION_CAP,
    AllocationMatrix,
    CostMatrix,
    EffectiveTimes,
    MachineCosts,
    MakespanEstimate,
)

MC_CHUNK_SIZE = 4096
_MAX_SEED = 2**64


def _require_same_shape(*matrices: CostMatrix | AllocationMatrix) -> None:
    shapes = {matrix.shape for matrix in matrices}
    if len(shapes) != 1:
        raise InputError(f"dimension mismatch: {sorted(shapes)}")


def _require_seed(seed: int) -> int:
    if not 0 <= int(seed) < _MAX_SEED:
        raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


def effective_times(decl: CostMatrix, truth: CostMatrix) -> EffectiveTimes:
    _require_same_shape(decl, truth)
    return EffectiveTimes(np.maximum(decl.values, truth.values))


def machine_costs(alloc: AllocationMatrix, decl: CostMatrix, truth: CostMatrix) -> MachineCosts:
    _require_same_shape(alloc, decl, truth)
    weighted = alloc.values * effective_times(decl, truth).values
    return MachineCosts(np.array([math.fsum(row) for row in weighted]))


def social_welfare(costs: MachineCosts) -> float:
    return math.fsum(costs.values)


def fractional_makespan(alloc: AllocationMatrix, decl: CostMatrix, truth: CostMatrix) -> float:
    return float(np.max(machine_costs(alloc, decl, truth).values))


def optimal_social_welfare(truth: CostMatrix) -> float:
    """Every task on its cheapest machine; no allocation rule can do better."""
    return math.fsum(np.min(truth.values, axis=0))


def enumerate_assignments(n: int, m: int, *, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """All n^m task->machine vectors in lexicographic order, one per row."""
    total = n**m
    if total > cap:
        raise CapacityError(
            f"{n}^{m} = {total} joint assignments exceed the enumeration cap {cap}; "
            "use mc_expected_makespan for a Monte Carlo estimate"
        )
    return np.stack(np.unravel_index(np.arange(total), (n,) * m), axis=1)


def assignment_makespans(assignments: np.ndarray, eff: np.ndarray) -> np.ndarray:
    count, m = assignments.shape
    loads = np.zeros((count, eff.shape[0]))
    rows = np.arange(count)
    for task in range(m):
        chosen = assignments[:, task]
        loads[rows, chosen] += eff[chosen, task]
    return loads.max(axis=1)


def realized_makespan(assignment: Sequence[int], decl: CostMatrix, truth: CostMatrix) -> float:
    if len(assignment) != truth.m:
        raise InputError(f"assignment covers {len(assignment)} tasks, instance has {truth.m}")
    if any(not 0 <= int(machine) < truth.n for machine in assignment):
        raise InputError(f"assignment {list(assignment)} names a machine outside 0..{truth.n - 1}")
    eff = effective_times(decl, truth).values
    return float(assignment_makespans(np.asarray([assignment], dtype=int), eff)[0])


def exact_expected_makespan(
    alloc: AllocationMatrix,
    decl: CostMatrix,
    truth: CostMatrix,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> MakespanEstimate:
    _require_same_shape(alloc, decl, truth)
    assignments = enumerate_assignments(alloc.n, alloc.m, cap=cap)
    probabilities = np.prod(alloc.values[assignments, np.arange(alloc.m)], axis=1)
    makespans = assignment_makespans(assignments, effective_times(decl, truth).values)
    return MakespanEstimate(value=math.fsum(probabilities * makespans), method="exact-enumeration")


def _chunk_generator(seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, chunk))))


def _cumulative(alloc: AllocationMatrix) -> np.ndarray:
    cumulative = np.minimum(np.cumsum(alloc.values, axis=0), 1.0)
    cumulative[-1, :] = 1.0
    return cumulative


def _sample_chunk(cumulative: np.ndarray, seed: int, chunk: int, size: int) -> np.ndarray:
    n, m = cumulative.shape
    out = np.empty((size, m), dtype=int)
    for task in range(m):
        draws = _chunk_generator(seed, task, chunk).random(size)
        out[:, task] = np.minimum(np.searchsorted(cumulative[:, task], draws, side="right"), n - 1)
    return out


def _chunk_sizes(samples: int) -> list[int]:
    full, rest = divmod(samples, MC_CHUNK_SIZE)
    return [MC_CHUNK_SIZE] * full + ([rest] if rest else [])


def sample_assignments(alloc: AllocationMatrix, samples: int, seed: int, *, workers: int = 1) -> np.ndarray:
    """Independent per-task draws; row k is the k-th sampled assignment whatever ``workers`` is."""
    if samples < 1:
        raise InputError("samples must be at least 1")
    seed = _require_seed(seed)
    cumulative = _cumulative(alloc)

    def run(job: tuple[int, int]) -> np.ndarray:
        index, size = job
        return _sample_chunk(cumulative, seed, index, size)

    jobs = list(enumerate(_chunk_sizes(samples)))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.concatenate(list(pool.map(run, jobs)), axis=0)
    return np.concatenate([run(job) for job in jobs], axis=0)


def mc_expected_makespan(
    alloc: AllocationMatrix,
    decl: CostMatrix,
    truth: CostMatrix,
    samples: int,
    seed: int,
    *,
    workers: int = 1,
) -> MakespanEstimate:
    _require_same_shape(alloc, decl, truth)
    assignments = sample_assignments(alloc, samples, seed, workers=workers)
    makespans = assignment_makespans(assignments, effective_times(decl, truth).values)

    if np.all(makespans == makespans[0]):
        return MakespanEstimate(value=float(makespans[0]), method="monte-carlo", samples=samples, stderr=0.0, seed=seed)
    mean = math.fsum(makespans) / samples
    stderr = float(np.std(makespans, ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return MakespanEstimate(value=mean, method="monte-carlo", samples=samples, stderr=stderr, seed=seed)


def optimal_integral_makespan(
    truth: CostMatrix,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[float, tuple[int, ...]]:
    """Brute-force optimum; among ties within ABS_TOL the lexicographically smallest assignment wins."""
    assignments = enumerate_assignments(truth.n, truth.m, cap=cap)
    makespans = assignment_makespans(assignments, truth.values)
    best = float(makespans.min())
    index = int(np.flatnonzero(makespans <= best + ABS_TOL)[0])
    return best, tuple(int(machine) for machine in assignments[index])
