from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from src.core import InputError

Verdict = Literal["pass", "fail", "flagged"]
MeasureMethod = Literal["closed-form", "enumeration", "monte-carlo", "quadrature", "simplex"]

EXIT_CODES: dict[Verdict, int] = {"pass": 0, "flagged": 5, "fail": 4}


@dataclass(slots=True, frozen=True)
class Measurement:
    value: float
    method: MeasureMethod
    seed: int | None = None
    samples: int | None = None
    stderr: float | None = None

    def __post_init__(self) -> None:
        if self.method == "monte-carlo" and self.seed is None:
            raise InputError("monte-carlo measurements must record their seed")

    def to_dict(self) -> dict[str, object]:
        payload: dict[str, object] = {"value": self.value, "method": self.method}
        if self.method == "monte-carlo":
            payload.update({"seed": self.seed, "samples": self.samples, "stderr": self.stderr})
        return payload


@dataclass(slots=True, frozen=True)
class Claim:
    value: float
    statement: str

    def to_dict(self) -> dict[str, object]:
        return {"value": self.value, "statement": self.statement}


@dataclass(slots=True)
class ExperimentReport:
    """Measured values next to the values a published result predicts, with a verdict per comparison."""

    name: str
    inputs: dict[str, object] = field(default_factory=dict)
    measured: dict[str, Measurement] = field(default_factory=dict)
    claimed: dict[str, Claim] = field(default_factory=dict)
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def measure(self, key: str, value: float, method: MeasureMethod, **sampling: int | float | None) -> None:
        self.measured[key] = Measurement(value=float(value), method=method, **sampling)

    def claim(self, key: str, value: float, statement: str) -> None:
        self.claimed[key] = Claim(value=float(value), statement=statement)

    def judge(self, key: str, ok: bool, *, flag_only: bool = False) -> Verdict:
        verdict: Verdict = "pass" if ok else ("flagged" if flag_only else "fail")
        self.verdicts[key] = verdict
        return verdict

    def merge(self, other: ExperimentReport, *, prefix: str) -> None:
        for key, value in other.measured.items():
            self.measured[f"{prefix}.{key}"] = value
        for key, claim in other.claimed.items():
            self.claimed[f"{prefix}.{key}"] = claim
        for key, verdict in other.verdicts.items():
            self.verdicts[f"{prefix}.{key}"] = verdict
        self.notes.extend(other.notes)

    @property
    def status(self) -> Verdict:
        found = set(self.verdicts.values())
        if "fail" in found:
            return "fail"
        if "flagged" in found:
            return "flagged"
        return "pass"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def summary(self) -> str:
        counts = {verdict: list(self.verdicts.values()).count(verdict) for verdict in ("pass", "flagged", "fail")}
        return f"{self.name}: {self.status} ({counts['pass']} pass, {counts['flagged']} flagged, {counts['fail']} fail)"

    def to_dict(self) -> dict[str, object]:
        return {
            "name": self.name,
            "status": self.status,
            "inputs": self.inputs,
            "measured": {key: value.to_dict() for key, value in self.measured.items()},
            "claimed": {key: value.to_dict() for key, value in self.claimed.items()},
            "verdicts": dict(self.verdicts),
            "notes": list(self.notes),
        }
