from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from src.config import InstanceFile, RunConfig
from src.core import (
    AnalysisError,
    CostMatrix,
    InputError,
    MakespanEstimate,
    exact_expected_makespan,
    fractional_makespan,
    machine_costs,
    mc_expected_makespan,
    optimal_integral_makespan,
    social_welfare,
)
from src.equilibrium import (
    BidGrid,
    build_grid,
    claim_predicates,
    enumerate_pure_equilibria,
    pos_certificate,
    pure_poa,
    pure_pos,
    single_task_pivots,
)
from src.experiments import reproduce
from src.lp import solve_scheduling_lp
from src.mechanisms import AllocationRule, build_mechanism

logger = logging.getLogger("anarchy_sched.router")

COMMANDS = ("allocate", "equilibria", "poa", "pos-certify", "reproduce", "simulate")


@dataclass(slots=True)
class StructuredCommand:
    name: str
    args: dict[str, Any] = field(default_factory=dict)


@dataclass(slots=True, frozen=True)
class CommandOutcome:
    payload: dict[str, Any]
    exit_code: int = 0
    summary: str = ""


class CommandRouter:
    """Dispatch structured commands to the library and shape the results into report payloads."""

    def __init__(self, config: RunConfig) -> None:
        self._config = config

    def handle_structured(self, command: StructuredCommand) -> CommandOutcome:
        handlers = {
            "allocate": self._allocate,
            "equilibria": self._equilibria,
            "poa": self._poa,
            "pos-certify": self._pos_certify,
            "reproduce": self._reproduce,
            "simulate": self._simulate,
        }
        handler = handlers.get(command.name)
        if handler is None:
            raise InputError(f"unknown command {command.name!r}; choose one of {', '.join(COMMANDS)}")
        logger.debug("[router] %s mechanism=%s seed=%d", command.name, self._config.mechanism, self._config.seed)
        return handler(command.args)

    def _instance(self, args: dict[str, Any]) -> InstanceFile:
        instance = args.get("instance")
        if isinstance(instance, InstanceFile):
            return instance
        if instance is None:
            raise InputError("this command needs --instance PATH")
        return InstanceFile.load(instance)

    def _mechanism(self, n: int) -> AllocationRule:
        params = self._config.params_for(n) if self._config.mechanism in ("alg2", "algN") else None
        return build_mechanism(self._config.mechanism, n=n, params=params)

    def _makespan(self, alloc: Any, decl: CostMatrix, truth: CostMatrix) -> MakespanEstimate:
        if truth.n**truth.m <= self._config.enumeration_cap:
            return exact_expected_makespan(alloc, decl, truth, cap=self._config.enumeration_cap)
        return mc_expected_makespan(alloc, decl, truth, self._config.samples, self._config.seed, workers=self._config.workers)

    def _grid(self, truth: CostMatrix) -> BidGrid:
        cfg = self._config
        if cfg.mechanism in ("alg2", "algN"):
            params = cfg.params_for(truth.n)
            pivots = [single_task_pivots(truth.column(task), params) for task in range(truth.m)]
            return build_grid(truth, cfg.grid_factor, cfg.grid_span, task_pivots=pivots)
        return build_grid(truth, cfg.grid_factor, cfg.grid_span)

    def _allocate(self, args: dict[str, Any]) -> CommandOutcome:
        instance = self._instance(args)
        truth, decl = instance.truth, instance.declarations
        alloc = self._mechanism(truth.n)(decl)
        costs = machine_costs(alloc, decl, truth)
        makespan = self._makespan(alloc, decl, truth)
        payload: dict[str, Any] = {
            "command": "allocate",
            "mechanism": self._config.mechanism,
            "allocation": alloc.to_list(),
            "machine_costs": costs.to_list(),
            "social_welfare": social_welfare(costs),
            "fractional_makespan": fractional_makespan(alloc, decl, truth),
            "expected_makespan": makespan.to_dict(),
        }
        if self._config.mechanism in ("alg2", "algN"):
            payload["params"] = self._config.params_for(truth.n).to_dict()
        if self._config.mechanism == "lp":
            payload["lp_mu"] = solve_scheduling_lp(decl).mu
        return CommandOutcome(payload=payload, summary=f"expected makespan {makespan.value:.6g} ({makespan.method})")

    def _equilibria(self, args: dict[str, Any]) -> CommandOutcome:
        instance = self._instance(args)
        truth = instance.truth
        grid = self._grid(truth)
        found = enumerate_pure_equilibria(
            self._mechanism(truth.n),
            truth,
            grid,
            self._config.eps_for(truth),
            profile_cap=self._config.profile_cap,
            enumeration_cap=self._config.enumeration_cap,
        )
        if not found.entries:
            raise AnalysisError(
                f"no pure equilibrium among {grid.profile_count()} grid profiles; "
                "raise --grid-span or lower --grid-factor"
            )
        entries = []
        check_claims = self._config.mechanism in ("alg2", "algN") and truth.m == 1
        for entry in found:
            row = entry.to_dict()
            if check_claims:
                row["claims"] = claim_predicates(entry.profile, truth, self._config.params_for(truth.n), grid.factor)
            entries.append(row)
        payload = {
            "command": "equilibria",
            "mechanism": self._config.mechanism,
            "eps": found.eps,
            "grid": {"factor": grid.factor, "span": grid.span, "profiles": grid.profile_count()},
            "count": len(found),
            "equilibria": entries,
        }
        return CommandOutcome(payload=payload, summary=f"{len(found)} pure equilibria on the grid")

    def _poa(self, args: dict[str, Any]) -> CommandOutcome:
        instance = self._instance(args)
        truth = instance.truth
        rule = self._mechanism(truth.n)
        grid = self._grid(truth)
        found = enumerate_pure_equilibria(
            rule,
            truth,
            grid,
            self._config.eps_for(truth),
            profile_cap=self._config.profile_cap,
            enumeration_cap=self._config.enumeration_cap,
        )
        poa = pure_poa(rule, truth, grid, equilibria=found, enumeration_cap=self._config.enumeration_cap)
        pos = pure_pos(rule, truth, grid, equilibria=found, enumeration_cap=self._config.enumeration_cap)
        optimum, assignment = optimal_integral_makespan(truth, cap=self._config.enumeration_cap)
        payload = {
            "command": "poa",
            "mechanism": self._config.mechanism,
            "equilibria": len(found),
            "price_of_anarchy": poa,
            "price_of_stability": pos,
            "optimal_makespan": optimum,
            "optimal_assignment": list(assignment),
            "worst_profile": found.worst().profile.to_list(),
        }
        return CommandOutcome(payload=payload, summary=f"grid PoA {poa:.6g}, PoS {pos:.6g}")

    def _pos_certify(self, args: dict[str, Any]) -> CommandOutcome:
        instance = self._instance(args)
        truth = instance.truth
        assignment = args.get("assignment")
        if assignment is None:
            _, assignment = optimal_integral_makespan(truth, cap=self._config.enumeration_cap)
        grid = build_grid(truth, self._config.grid_factor, self._config.grid_span)
        certificate = pos_certificate(
            truth,
            assignment,
            self._config.samples,
            self._config.seed,
            grid,
            self._config.eps_for(truth),
            enumeration_cap=self._config.enumeration_cap,
        )
        payload = {"command": "pos-certify", **certificate.to_dict()}
        verdict = "passed" if certificate.passed else "failed"
        return CommandOutcome(
            payload=payload,
            exit_code=0 if certificate.passed else AnalysisError.exit_code,
            summary=f"greedy mixed-equilibrium certificate {verdict}, makespan ratio {certificate.ratio:.6g}",
        )

    def _reproduce(self, args: dict[str, Any]) -> CommandOutcome:
        name = args.get("name")
        if not name:
            raise InputError("reproduce needs a result name")
        settings = self._config.experiment_settings(
            n=args.get("n"), m=args.get("m"), M=args.get("M"), trials=args.get("trials")
        )
        report = reproduce(str(name), settings)
        return CommandOutcome(payload={"command": "reproduce", **report.to_dict()}, exit_code=report.exit_code, summary=report.summary())

    def _simulate(self, args: dict[str, Any]) -> CommandOutcome:
        instance = self._instance(args)
        truth, decl = instance.truth, instance.declarations
        alloc = self._mechanism(truth.n)(decl)
        estimate = mc_expected_makespan(
            alloc, decl, truth, self._config.samples, self._config.seed, workers=self._config.workers
        )
        low, high = estimate.interval()
        payload = {
            "command": "simulate",
            "mechanism": self._config.mechanism,
            "allocation": alloc.to_list(),
            "expected_makespan": estimate.to_dict(),
            "interval_95": [low, high],
        }
        return CommandOutcome(payload=payload, summary=f"Monte Carlo makespan {estimate.value:.6g} ± {estimate.stderr:.2g}")
