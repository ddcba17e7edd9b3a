from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from src.core import CostMatrix, InputError

REQUIRED_KEYS = frozenset({"n", "m", "true_times"})
ALLOWED_KEYS = REQUIRED_KEYS | {"declared_times"}


@dataclass(slots=True, frozen=True)
class InstanceFile:
    """A scheduling instance as written on disk: true times plus optional declarations."""

    n: int
    m: int
    truth: CostMatrix
    declared: CostMatrix | None = None

    @property
    def declarations(self) -> CostMatrix:
        return self.declared if self.declared is not None else self.truth

    @classmethod
    def load(cls, path: str | Path) -> InstanceFile:
        target = Path(path)
        try:
            payload = json.loads(target.read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read instance file {target}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"instance file {target} is not valid JSON: {exc}") from exc
        return cls.parse(payload)

    @classmethod
    def parse(cls, payload: Any) -> InstanceFile:
        if not isinstance(payload, Mapping):
            raise InputError("instance must be a JSON object")
        unknown = sorted(set(payload) - ALLOWED_KEYS)
        if unknown:
            raise InputError(f"unknown instance keys: {', '.join(unknown)}")
        missing = sorted(REQUIRED_KEYS - set(payload))
        if missing:
            raise InputError(f"missing instance keys: {', '.join(missing)}")
        n, m = payload["n"], payload["m"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise InputError(f"n must be a positive integer, got {n!r}")
        if not isinstance(m, int) or isinstance(m, bool) or m < 1:
            raise InputError(f"m must be a positive integer, got {m!r}")

        truth = cls._matrix(payload["true_times"], n, m, "true_times")
        declared_raw = payload.get("declared_times")
        declared = None if declared_raw is None else cls._matrix(declared_raw, n, m, "declared_times")
        return cls(n=n, m=m, truth=truth, declared=declared)

    @staticmethod
    def _matrix(rows: Any, n: int, m: int, name: str) -> CostMatrix:
        if not isinstance(rows, list) or len(rows) != n or any(not isinstance(row, list) or len(row) != m for row in rows):
            raise InputError(f"{name} must be a {n}x{m} array")
        if any(isinstance(value, bool) or not isinstance(value, (int, float)) for row in rows for value in row):
            raise InputError(f"{name} entries must be numbers")
        matrix = CostMatrix.of(rows)
        matrix.require_positive(name)
        return matrix

    def to_dict(self) -> dict[str, object]:
        return {
            "n": self.n,
            "m": self.m,
            "true_times": self.truth.to_list(),
            "declared_times": None if self.declared is None else self.declared.to_list(),
        }
