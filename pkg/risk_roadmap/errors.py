"""Exception hierarchy shared by the planners and the command line.

Every error carries an ``exit_code`` so ``cli.main`` can translate failures
into process exit codes without a lookup table.
"""
from __future__ import annotations

from typing import Optional


class RiskRoadmapError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InvalidParameter(RiskRoadmapError, ValueError):
    exit_code = 3


class OutOfBounds(RiskRoadmapError):
    exit_code = 3


class CollisionError(RiskRoadmapError):
    exit_code = 3


class EmptyRoadmap(RiskRoadmapError):
    exit_code = 3


class NotAnEdge(RiskRoadmapError):
    exit_code = 3


class InvalidQuery(RiskRoadmapError):
    exit_code = 3


class UnsupportedQuery(InvalidQuery):
    """The chosen planner cannot answer this kind of query (e.g. Risk endpoints)."""


class InvalidComparison(RiskRoadmapError):
    exit_code = 3


class InternalError(RiskRoadmapError):
    exit_code = 1


class Unreachable(RiskRoadmapError):
    """Raised by the brute-force oracle; planners report unreachability in their result."""

    exit_code = 2


class InstanceTooLarge(RiskRoadmapError):
    exit_code = 4


class ResourceAbort(RiskRoadmapError):
    exit_code = 4


class MemoryBudgetExceeded(ResourceAbort):
    def __init__(self, estimate_bytes: int, budget_bytes: int) -> None:
        self.estimate_bytes = int(estimate_bytes)
        self.budget_bytes = int(budget_bytes)
        super().__init__(
            f"border table needs ~{self.estimate_bytes:,} bytes, budget is {self.budget_bytes:,}"
        )


class OutputWriteError(RiskRoadmapError):
    """Writing a result, CSV or SVG file failed; the message names the path."""

    exit_code = 1

    def __init__(self, path: str, reason: str) -> None:
        self.path = path
        super().__init__(f"cannot write {path}: {reason}")


class ScenarioParseError(RiskRoadmapError):
    exit_code = 3

    def __init__(self, message: str, *, line: Optional[int] = None, column: Optional[int] = None,
                 source: Optional[str] = None) -> None:
        self.line = line
        self.column = column
        self.source = source
        location = ""
        if source:
            location = source
        if line is not None:
            location = f"{location}:{line}" if location else f"line {line}"
            if column is not None:
                location = f"{location}:{column}"
        super().__init__(f"{location}: {message}" if location else message)


__all__ = [
    "RiskRoadmapError",
    "InvalidParameter",
    "OutOfBounds",
    "CollisionError",
    "EmptyRoadmap",
    "NotAnEdge",
    "InvalidQuery",
    "UnsupportedQuery",
    "InvalidComparison",
    "InternalError",
    "Unreachable",
    "InstanceTooLarge",
    "ResourceAbort",
    "MemoryBudgetExceeded",
    "ScenarioParseError",
    "OutputWriteError",
]
