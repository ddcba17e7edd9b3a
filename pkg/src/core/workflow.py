from __future__ import annotations

import logging
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Protocol

from .errors import SchedulingError

logger = logging.getLogger("anarchy_sched.hooks")


class WorkflowHook(Protocol):
    """Receives `command.*` events; a raising hook is logged and skipped."""

    def on_event(self, name: str, payload: dict[str, object]) -> None: ...


class CommandPort(Protocol):
    name: str
    args: dict[str, Any]


class RouterPort(Protocol):
    def handle_structured(self, command: Any) -> Any: ...


@dataclass(slots=True)
class LoggingHook:
    """Writes command events to stderr at INFO; the CLI raises the level unless --verbose."""

    logger: logging.Logger = field(default_factory=lambda: logging.getLogger("anarchy_sched.workflow"))
    level: int = logging.INFO

    def __post_init__(self) -> None:
        self.logger.setLevel(self.level)
        if not self.logger.handlers:
            stderr = logging.StreamHandler(sys.stderr)
            stderr.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
            self.logger.addHandler(stderr)
        self.logger.propagate = False

    def on_event(self, name: str, payload: dict[str, object]) -> None:
        self.logger.info("[analysis] %s %s", name, payload)


@dataclass(slots=True)
class AnalysisWorkflow:
    """Runs one structured command through the router and reports its lifecycle to the hooks.

    cli -> workflow -> router -> library -> report
    """

    router: RouterPort
    hooks: list[WorkflowHook] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.hooks:
            self.hooks.append(LoggingHook())

    def process(self, command: CommandPort) -> Any:
        started = time.perf_counter()
        self._emit("command.received", {"command": command.name, "args": sorted(command.args)})
        try:
            outcome = self.router.handle_structured(command)
        except SchedulingError as exc:
            self._emit(
                "command.failed",
                {"command": command.name, "error": type(exc).__name__, "exit_code": exc.exit_code, "message": str(exc)},
            )
            raise
        self._emit(
            "command.completed",
            {
                "command": command.name,
                "exit_code": getattr(outcome, "exit_code", 0),
                "elapsed_s": round(time.perf_counter() - started, 3),
            },
        )
        return outcome

    def _emit(self, event: str, payload: dict[str, object]) -> None:
        for hook in self.hooks:
            try:
                hook.on_event(event, payload)
            except Exception:
                logger.debug("hook %s failed on %s", type(hook).__name__, event, exc_info=True)
