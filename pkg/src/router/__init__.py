from .router import COMMANDS, CommandOutcome, CommandRouter, StructuredCommand
from .structured_service import ReportService

__all__ = ["COMMANDS", "CommandOutcome", "CommandRouter", "ReportService", "StructuredCommand"]
