"""Dispatch from algorithm id to planner."""
from __future__ import annotations

from typing import TYPE_CHECKING, Optional

from .baselines import dijkstra_shortest, min_risk_path
from .config import PlannerOptions
from .log_utils import LogFn, null_log
from .name_utils import resolve_algorithm
from .precompute_search import BorderTable, precompute_search
from .rasp_search import astar_search, incremental_search
from .results import PathResult
from .roadmap import RefinedRoadmap

if TYPE_CHECKING:
    from .scenario import PreparedScenario


def run_algorithm(
    algorithm: str,
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    options: Optional[PlannerOptions] = None,
    clean_log: Optional[LogFn] = None,
    *,
    table: Optional[BorderTable] = None,
) -> PathResult:
    algorithm = resolve_algorithm(algorithm)
    options = (options or PlannerOptions()).with_changes(algorithm=algorithm)
    log = clean_log or null_log
    if algorithm == "incremental":
        return incremental_search(g, xs, xg, options, log)
    if algorithm == "astar":
        return astar_search(g, xs, xg, options.heuristic, options, log)
    if algorithm == "precompute":
        return precompute_search(g, xs, xg, options, log, table=table)
    if algorithm == "dijkstra":
        return dijkstra_shortest(g, xs, xg, options, log)
    return min_risk_path(g, xs, xg, options, log)


def run_plan(
    prepared: "PreparedScenario",
    algorithm: Optional[str] = None,
    options: Optional[PlannerOptions] = None,
    clean_log: Optional[LogFn] = None,
) -> PathResult:
    """Run one planner on a prepared scenario and stamp scenario metadata on the result."""
    options = options or prepared.options
    algorithm = algorithm or options.algorithm
    g = prepared.refined
    result = run_algorithm(algorithm, g, prepared.xs, prepared.xg, options, clean_log)
    result.metadata.update({
        "scenario": prepared.scenario.name,
        "seed": prepared.scenario.seed,
        "start": g.label(prepared.xs),
        "goal": g.label(prepared.xg),
        "vertices": len(g),
        "build_seconds": prepared.build_seconds,
    })
    return result


__all__ = ["run_algorithm", "run_plan"]
