from __future__ import annotations

import json
import math
import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np

from src.core import DEFAULT_ENUMERATION_CAP, CostMatrix, InputError, ParameterError
from src.equilibrium import DEFAULT_PROFILE_CAP
from src.experiments import ExperimentSettings
from src.mechanisms import MECHANISM_NAMES, AlgParams

OutputFormat = Literal["json", "csv"]


@dataclass(slots=True, frozen=True)
class RunConfig:
    """Resolved settings for one CLI run; L, c and eps stay unset until the instance size is known."""

    mechanism: str = "algN"
    L: float | None = None
    c: float | None = None
    grid_factor: float = 1.25
    grid_span: int = 12
    eps: float | None = None
    samples: int = 100_000
    seed: int = 0
    output: OutputFormat = "json"
    output_path: Path | None = None
    workers: int = 1
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    profile_cap: int = DEFAULT_PROFILE_CAP

    def __post_init__(self) -> None:
        if self.mechanism not in MECHANISM_NAMES:
            raise InputError(f"unknown mechanism {self.mechanism!r}; choose one of {', '.join(MECHANISM_NAMES)}")
        if self.L is not None and (not math.isfinite(self.L) or self.L <= 0):
            raise ParameterError(f"L must be positive, got {self.L}")
        if self.c is not None and (not math.isfinite(self.c) or self.c <= 1):
            raise ParameterError(f"c must exceed 1, got {self.c}")
        if not math.isfinite(self.grid_factor) or self.grid_factor <= 1:
            raise ParameterError(f"grid factor must exceed 1, got {self.grid_factor}")
        if self.grid_span < 1:
            raise ParameterError(f"grid span must be at least 1, got {self.grid_span}")
        if self.eps is not None and self.eps < 0:
            raise ParameterError(f"eps must be nonnegative, got {self.eps}")
        if self.samples < 1:
            raise ParameterError(f"samples must be at least 1, got {self.samples}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise ParameterError(f"workers must be at least 1, got {self.workers}")
        if self.enumeration_cap < 1 or self.profile_cap < 1:
            raise ParameterError(f"caps must be at least 1, got {self.enumeration_cap} and {self.profile_cap}")
        if self.output not in ("json", "csv"):
            raise InputError(f"output must be json or csv, got {self.output!r}")

    def params_for(self, n: int) -> AlgParams:
        """L defaults to max(4(n-1), 4) and c to 1 + 1/L."""
        L = self.L if self.L is not None else float(max(4 * (n - 1), 4))
        c = self.c if self.c is not None else 1.0 + 1.0 / L
        return AlgParams(L=L, c=c, n=n)

    def eps_for(self, truth: CostMatrix) -> float:
        return self.eps if self.eps is not None else 1e-9 * float(np.max(truth.values))

    def experiment_settings(self, **overrides: Any) -> ExperimentSettings:
        values: dict[str, Any] = {
            "L": self.L,
            "c": self.c,
            "samples": self.samples,
            "seed": self.seed,
            "grid_factor": self.grid_factor,
            "grid_span": self.grid_span,
            "workers": self.workers,
            "enumeration_cap": self.enumeration_cap,
            "profile_cap": self.profile_cap,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return ExperimentSettings(**values)


@dataclass(slots=True)
class ConfigManager:
    """Load run settings from a local JSON file and resolve them against CLI flags and the environment.

    Precedence per key: explicit flag, then the ``run``/``limits`` sections of the
    file, then ``ANARCHY_<KEY>`` environment variables, then built-in defaults.
    """

    config_file: Path = Path("data/anarchy.local.json")
    legacy_config_file: Path = Path("config/anarchy.local.json")
    explicit: bool = False
    _raw: dict[str, Any] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        self.reload()

    @classmethod
    def from_path(cls, path: str | Path | None) -> ConfigManager:
        if path is None:
            return cls()
        return cls(config_file=Path(path), explicit=True)

    def reload(self) -> None:
        self._raw = {}
        target = self.config_file
        if not target.exists() and not self.explicit and self.legacy_config_file.exists():
            target = self.legacy_config_file

        if not target.exists():
            if self.explicit:
                raise InputError(f"config file {target} does not exist")
            return

        try:
            parsed = json.loads(target.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config file {target}: {exc}") from exc

        if isinstance(parsed, dict):
            self._raw = parsed

    def section(self, name: str) -> dict[str, Any]:
        value = self._raw.get(name)
        if isinstance(value, dict):
            return value
        return {}

    def build_run_config(self, flags: Mapping[str, Any] | None = None) -> RunConfig:
        cli = {key: value for key, value in (flags or {}).items() if value is not None}
        run = {**self.section("run"), **cli}
        limits = {**self.section("limits"), **cli}
        out = self._pick_str(run, "output_path", env_key="ANARCHY_OUT")
        return RunConfig(
            mechanism=self._pick_str(run, "mechanism", env_key="ANARCHY_MECHANISM", default="algN") or "algN",
            L=self._pick_optional_float(run, "L", env_key="ANARCHY_L"),
            c=self._pick_optional_float(run, "c", env_key="ANARCHY_C"),
            grid_factor=self._pick_float(run, "grid_factor", env_key="ANARCHY_GRID_FACTOR", default=1.25),
            grid_span=self._pick_int(run, "grid_span", env_key="ANARCHY_GRID_SPAN", default=12),
            eps=self._pick_optional_float(run, "eps", env_key="ANARCHY_EPS"),
            samples=self._pick_int(run, "samples", env_key="ANARCHY_SAMPLES", default=100_000),
            seed=self._pick_int(run, "seed", env_key="ANARCHY_SEED", default=0),
            output=self._pick_output(run),
            output_path=Path(out) if out else None,
            workers=self._pick_int(run, "workers", env_key="ANARCHY_WORKERS", default=1),
            enumeration_cap=self._pick_int(
                limits, "enumeration_cap", env_key="ANARCHY_ENUMERATION_CAP", default=DEFAULT_ENUMERATION_CAP
            ),
            profile_cap=self._pick_int(limits, "profile_cap", env_key="ANARCHY_PROFILE_CAP", default=DEFAULT_PROFILE_CAP),
        )

    def _lookup(self, section: dict[str, Any], key: str, env_key: str | None) -> Any:
        value = section.get(key)
        if value is None and env_key:
            value = os.getenv(env_key)
        if isinstance(value, str) and not value.strip():
            return None
        return value

    def _pick_str(
        self,
        section: dict[str, Any],
        key: str,
        *,
        env_key: str | None = None,
        default: str | None = None,
    ) -> str | None:
        value = section.get(key)
        if isinstance(value, str):
            value = value.strip()
            if value:
                return value
        elif value is not None:
            return str(value)

        if env_key:
            env_value = os.getenv(env_key)
            if env_value is not None:
                env_value = env_value.strip()
                if env_value:
                    return env_value

        return default

    def _pick_float(
        self,
        section: dict[str, Any],
        key: str,
        *,
        env_key: str | None = None,
        default: float,
    ) -> float:
        parsed = self._pick_optional_float(section, key, env_key=env_key)
        return default if parsed is None else parsed

    def _pick_optional_float(self, section: dict[str, Any], key: str, *, env_key: str | None = None) -> float | None:
        value = self._lookup(section, key, env_key)
        if value is None:
            return None
        try:
            return float(value)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"{key} must be a number, got {value!r}") from exc

    def _pick_int(self, section: dict[str, Any], key: str, *, env_key: str | None = None, default: int) -> int:
        value = self._lookup(section, key, env_key)
        if value is None:
            return default
        try:
            return int(value)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"{key} must be an integer, got {value!r}") from exc

    def _pick_output(self, section: dict[str, Any]) -> OutputFormat:
        value = (self._pick_str(section, "output", env_key="ANARCHY_OUTPUT", default="json") or "json").lower()
        if value == "csv":
            return "csv"
        if value == "json":
            return "json"
        raise InputError(f"output must be json or csv, got {value!r}")
