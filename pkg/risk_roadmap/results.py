"""Planner result records shared by every algorithm."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from .cost import CostBreakdown, Excursion, path_cost
from .roadmap import RefinedRoadmap
from .world import Point, Zone


@dataclass
class SearchStats:
    expansions: int = 0
    pushes: int = 0
    decreases: int = 0
    pruned: int = 0
    evicted: int = 0
    queue_peak: int = 0
    live_channels_peak: int = 0
    wall_time: float = 0.0
    phases: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class TraceEvent:
    event: str
    vertex: int
    phi: Optional[int]
    cost: float

    def to_dict(self) -> Dict[str, Any]:
        return {"event": self.event, "vertex": self.vertex, "phi": self.phi, "cost": self.cost}


@dataclass
class PathResult:
    algorithm: str
    reachable: bool
    path: List[int] = field(default_factory=list)
    points: List[Point] = field(default_factory=list)
    zones: List[Zone] = field(default_factory=list)
    breakdown: Optional[CostBreakdown] = None
    length: float = 0.0
    search_cost: Optional[float] = None
    stats: SearchStats = field(default_factory=SearchStats)
    trace: Optional[List[TraceEvent]] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def cost(self) -> float:
        if not self.reachable or self.breakdown is None:
            return float("inf")
        return self.breakdown.total_cost

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "algorithm": self.algorithm,
            "reachable": self.reachable,
            "path": list(self.path),
            "points": [list(p) for p in self.points],
            "zones": [z.value for z in self.zones],
            "length": self.length,
            "cost": self.breakdown.total_cost if self.breakdown else None,
            "search_cost": self.search_cost,
            "breakdown": self.breakdown.to_dict() if self.breakdown else None,
            "stats": self.stats.to_dict(),
            "metadata": dict(self.metadata),
        }
        if self.trace is not None:
            data["trace"] = [e.to_dict() for e in self.trace]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PathResult":
        raw = data.get("breakdown")
        breakdown = None
        if raw:
            breakdown = CostBreakdown(
                total_cost=raw["total_cost"],
                total_time=raw["total_time"],
                safe_time=raw["safe_time"],
                excursions=[Excursion(**e) for e in raw.get("excursions", [])],
                final_lambda=raw.get("final_lambda", 0.0),
            )
        trace = None
        if "trace" in data:
            trace = [TraceEvent(**e) for e in data["trace"]]
        stats = SearchStats(**data.get("stats", {}))
        return cls(
            algorithm=data["algorithm"],
            reachable=data["reachable"],
            path=list(data.get("path", [])),
            points=[tuple(p) for p in data.get("points", [])],
            zones=[Zone(z) for z in data.get("zones", [])],
            breakdown=breakdown,
            length=data.get("length", 0.0),
            search_cost=data.get("search_cost"),
            stats=stats,
            trace=trace,
            metadata=dict(data.get("metadata", {})),
        )


def build_result(
    algorithm: str,
    g: RefinedRoadmap,
    path: Optional[Sequence[int]],
    alpha: float,
    *,
    search_cost: Optional[float] = None,
    stats: Optional[SearchStats] = None,
    trace: Optional[List[TraceEvent]] = None,
    metadata: Optional[Dict[str, Any]] = None,
) -> PathResult:
    """Assemble a ``PathResult``; the reported cost is always re-evaluated from the path."""
    stats = stats or SearchStats()
    if path is None:
        return PathResult(algorithm, False, stats=stats, trace=trace, metadata=dict(metadata or {}))
    path = list(path)
    breakdown = path_cost(g, path, alpha)
    return PathResult(
        algorithm=algorithm,
        reachable=True,
        path=path,
        points=[g.points[v] for v in path],
        zones=[g.zones[v] for v in path],
        breakdown=breakdown,
        length=breakdown.total_time,
        search_cost=search_cost,
        stats=stats,
        trace=trace,
        metadata=dict(metadata or {}),
    )


__all__ = ["SearchStats", "TraceEvent", "PathResult", "build_result"]
