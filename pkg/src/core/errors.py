from __future__ import annotations


class SchedulingError(RuntimeError):
    """Base class for every failure the library reports to callers."""

    exit_code: int = 1


class InputError(SchedulingError):
    """Raised when an instance, declaration or argument is malformed."""

    exit_code = 2


class ParameterError(InputError):
    """Raised when mechanism or generator parameters violate their constraints."""


class DomainError(InputError):
    """Raised when a closed-form formula is evaluated outside its domain."""


class CapacityError(SchedulingError):
    """Raised when an exhaustive computation would exceed its configured cap."""

    exit_code = 3


class AnalysisError(SchedulingError):
    """Raised when an analysis cannot produce a meaningful answer."""

    exit_code = 4


class SolverError(AnalysisError):
    """Raised when the simplex solver fails to converge."""

    def __init__(self, message: str, *, iteration_log: list[dict[str, object]] | None = None) -> None:
        super().__init__(message)
        self.iteration_log = list(iteration_log or [])
