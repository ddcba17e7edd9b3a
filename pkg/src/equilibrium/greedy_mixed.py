from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.core import (
    DEFAULT_ENUMERATION_CAP,
    CapacityError,
    CostMatrix,
    DomainError,
    InputError,
    optimal_integral_makespan,
    realized_makespan,
)

from .grid import BidGrid

DEFAULT_SAMPLE_CAP = 10**8


@dataclass(slots=True, frozen=True)
class MixedGreedyProfile:
    """Designated machine per task bids its true time T_j; every other machine mixes with F_j on [T_j, inf)."""

    truth: CostMatrix
    assignment: tuple[int, ...]
    thresholds: tuple[float, ...]

    @property
    def n(self) -> int:
        return self.truth.n

    def designated(self, task: int) -> int:
        return self.assignment[task]

    def cdf(self, task: int, x: float | np.ndarray) -> float | np.ndarray:
        return mixed_bid_cdf(self.thresholds[task], self.n, x)

    def to_dict(self) -> dict[str, object]:
        return {"assignment": list(self.assignment), "thresholds": list(self.thresholds)}


def _check_assignment(truth: CostMatrix, assignment: Sequence[int]) -> tuple[int, ...]:
    if len(assignment) != truth.m:
        raise InputError(f"assignment covers {len(assignment)} tasks, instance has {truth.m}")
    chosen = tuple(int(machine) for machine in assignment)
    if any(not 0 <= machine < truth.n for machine in chosen):
        raise InputError(f"assignment {list(chosen)} names a machine outside 0..{truth.n - 1}")
    return chosen


def greedy_mixed_profile(truth: CostMatrix, assignment: Sequence[int]) -> MixedGreedyProfile:
    chosen = _check_assignment(truth, assignment)
    thresholds = tuple(float(truth.values[machine, task]) for task, machine in enumerate(chosen))
    return MixedGreedyProfile(truth=truth, assignment=chosen, thresholds=thresholds)


def mixed_bid_cdf(T: float, n: int, x: float | np.ndarray) -> float | np.ndarray:
    """F(x) = 1 - (T/x)^(1/(n-1)) for x >= T, zero below."""
    if n < 2:
        raise DomainError(f"mixed bids need at least two machines, got {n}")
    if T <= 0:
        raise DomainError(f"threshold must be positive, got {T}")
    values = np.asarray(x, dtype=float)
    out = np.where(values >= T, 1.0 - np.power(T / np.maximum(values, T), 1.0 / (n - 1)), 0.0)
    return float(out) if out.ndim == 0 else out


def sample_opponent_bids(T: float, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse transform x = T * u^-(n-1) with u uniform on (0, 1]; never returns T itself."""
    if n < 2:
        raise DomainError(f"mixed bids need at least two machines, got {n}")
    u = 1.0 - rng.random(size)
    bids = T * np.power(u, -(n - 1.0))
    return np.where(bids > T, bids, np.nextafter(T, np.inf))


def greedy_deviation_value(T: float, x_star: float, n: int) -> tuple[float, float]:
    """Probability that a deterministic bid x* beats all n-1 mixed opponents, and its expected cost."""
    if n < 2:
        raise DomainError(f"deviation needs at least two machines, got {n}")
    if not 0 < T < x_star:
        raise DomainError(f"deviation must satisfy x* > T > 0, got T={T}, x*={x_star}")
    win = (1.0 - mixed_bid_cdf(T, n, x_star)) ** (n - 1)
    return win, x_star * win


def _stream(seed: int, task: int, machine: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(task, machine))))


@dataclass(slots=True, frozen=True)
class DeviationCheck:
    x_star: float
    analytic_probability: float
    mc_probability: float
    stderr: float
    expected_cost: float
    passed: bool

    def to_dict(self) -> dict[str, object]:
        return {
            "x_star": self.x_star,
            "analytic_probability": self.analytic_probability,
            "mc_probability": self.mc_probability,
            "stderr": self.stderr,
            "expected_cost": self.expected_cost,
            "passed": self.passed,
        }


@dataclass(slots=True, frozen=True)
class TaskCertificate:
    task: int
    machine: int
    threshold: float
    realized_matches: int
    samples: int
    deviations: tuple[DeviationCheck, ...]
    undercuts: int
    undercut_ok: bool

    @property
    def passed(self) -> bool:
        return self.realized_matches == self.samples and self.undercut_ok and all(d.passed for d in self.deviations)

    def to_dict(self) -> dict[str, object]:
        return {
            "task": self.task,
            "machine": self.machine,
            "threshold": self.threshold,
            "realized_matches": self.realized_matches,
            "samples": self.samples,
            "undercuts": self.undercuts,
            "undercut_ok": self.undercut_ok,
            "deviations": [d.to_dict() for d in self.deviations],
            "passed": self.passed,
        }


@dataclass(slots=True, frozen=True)
class PosCertificate:
    profile: MixedGreedyProfile
    tasks: tuple[TaskCertificate, ...]
    realized_makespan: float
    optimal_makespan: float
    samples: int
    seed: int

    @property
    def ratio(self) -> float:
        return self.realized_makespan / self.optimal_makespan

    @property
    def passed(self) -> bool:
        return all(task.passed for task in self.tasks)

    def to_dict(self) -> dict[str, object]:
        return {
            "profile": self.profile.to_dict(),
            "tasks": [task.to_dict() for task in self.tasks],
            "realized_makespan": self.realized_makespan,
            "optimal_makespan": self.optimal_makespan,
            "ratio": self.ratio,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
        }


def _certify_task(
    profile: MixedGreedyProfile, task: int, samples: int, seed: int, grid: BidGrid, eps: float, z: float
) -> TaskCertificate:
    n = profile.n
    machine = profile.designated(task)
    T = profile.thresholds[task]
    bids = np.empty((samples, n))
    for other in range(n):
        if other == machine:
            bids[:, other] = T
        else:
            bids[:, other] = sample_opponent_bids(T, n, samples, _stream(seed, task, other))
    # argmin returns the lowest index among ties, as greedy does
    matches = int(np.count_nonzero(np.argmin(bids, axis=1) == machine))

    opponents = np.delete(bids, machine, axis=1)
    lowest = opponents.min(axis=1)
    checks = []
    undercuts = 0
    undercut_ok = True
    for x_star in grid.candidates(machine, task):
        if x_star <= T:
            # bids at or below T should win every draw at cost T
            win = float(np.count_nonzero(lowest > x_star)) / samples
            undercut_ok &= abs(max(x_star, T) * win - T) <= eps
            undercuts += 1
            continue
        analytic, cost = greedy_deviation_value(T, x_star, n)
        estimate = float(np.count_nonzero(lowest > x_star)) / samples
        stderr = math.sqrt(analytic * (1.0 - analytic) / samples)
        within = abs(estimate - analytic) <= z * stderr and abs(cost - T) <= eps
        checks.append(
            DeviationCheck(
                x_star=float(x_star),
                analytic_probability=analytic,
                mc_probability=estimate,
                stderr=stderr,
                expected_cost=cost,
                passed=bool(within),
            )
        )
    return TaskCertificate(
        task=task,
        machine=machine,
        threshold=T,
        realized_matches=matches,
        samples=samples,
        deviations=tuple(checks),
        undercuts=undercuts,
        undercut_ok=bool(undercut_ok),
    )


def pos_certificate(
    truth: CostMatrix,
    assignment: Sequence[int],
    samples: int,
    seed: int,
    deviation_grid: BidGrid,
    eps: float | None = None,
    *,
    z: float = 4.0,
    sample_cap: int = DEFAULT_SAMPLE_CAP,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> PosCertificate:
    """Check that the given assignment is what greedy realises under the mixed profile, and that no
    designated machine gains by deviating on the grid.
    """
    if truth.n < 2:
        raise InputError("a mixed greedy profile needs at least two machines")
    if samples < 1:
        raise InputError("samples must be at least 1")
    if not 0 <= seed < 2**64:
        raise InputError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if (deviation_grid.n, deviation_grid.m) != truth.shape:
        raise InputError(f"bid grid covers {deviation_grid.n}x{deviation_grid.m}, instance is {truth.n}x{truth.m}")
    draws = samples * truth.n * truth.m
    if draws > sample_cap:
        raise CapacityError(f"{draws} opponent draws exceed the sample cap {sample_cap}")
    truth.require_positive("true times for a mixed greedy profile")
    profile = greedy_mixed_profile(truth, assignment)
    tolerance = 1e-9 * float(np.max(truth.values)) if eps is None else eps
    tasks = tuple(_certify_task(profile, task, samples, seed, deviation_grid, tolerance, z) for task in range(truth.m))
    optimum, _ = optimal_integral_makespan(truth, cap=enumeration_cap)
    return PosCertificate(
        profile=profile,
        tasks=tasks,
        realized_makespan=realized_makespan(profile.assignment, truth, truth),
        optimal_makespan=optimum,
        samples=samples,
        seed=seed,
    )
