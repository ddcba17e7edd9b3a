from __future__ import annotations

import csv
import io
import json
import sys
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from src.core import InputError


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _flatten(value: Any, prefix: str = "") -> Iterator[tuple[str, Any]]:
    if isinstance(value, Mapping):
        for key in sorted(value):
            yield from _flatten(value[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(value, (list, tuple)):
        for index, item in enumerate(value):
            yield from _flatten(item, f"{prefix}[{index}]")
    else:
        yield prefix, value


@dataclass(slots=True)
class ReportService:
    """Render command payloads and write them to stdout or a file."""

    stream: TextIO | None = None

    def render(self, payload: Mapping[str, Any], fmt: str = "json") -> str:
        if fmt == "json":
            return json.dumps(payload, sort_keys=True, indent=2, default=_plain) + "\n"
        if fmt == "csv":
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(["key", "value"])
            for key, value in _flatten(json.loads(json.dumps(payload, default=_plain))):
                writer.writerow([key, "" if value is None else value])
            return buffer.getvalue()
        raise InputError(f"unsupported output format {fmt!r}")

    def write(self, text: str, path: Path | None = None) -> None:
        if path is None:
            (self.stream or sys.stdout).write(text)
            return
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write report to {path}: {exc}") from exc
