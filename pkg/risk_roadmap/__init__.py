"""Risk-aware minimal-cost path planning on roadmaps."""
from __future__ import annotations

from .baselines import dijkstra_shortest, min_risk_path
from .config import PlannerOptions, load_config, resolve_options
from .cost import CostBreakdown, path_cost, segment_cost
from .planner import run_algorithm, run_plan
from .precompute_search import precompute_search, risk_restricted_apsp
from .rasp_search import astar_search, dominates, expand, incremental_search
from .results import PathResult
from .roadmap import Roadmap, RefinedRoadmap, build_grid_roadmap, build_halton_roadmap, refine
from .scenario import Scenario, load_scenario
from .world import GridWorld, PolygonWorld, Zone

__version__ = "0.1.0"

__all__ = [
    "Zone",
    "GridWorld",
    "PolygonWorld",
    "Roadmap",
    "RefinedRoadmap",
    "build_grid_roadmap",
    "build_halton_roadmap",
    "refine",
    "segment_cost",
    "path_cost",
    "CostBreakdown",
    "expand",
    "dominates",
    "incremental_search",
    "astar_search",
    "precompute_search",
    "risk_restricted_apsp",
    "dijkstra_shortest",
    "min_risk_path",
    "PathResult",
    "PlannerOptions",
    "load_config",
    "resolve_options",
    "run_algorithm",
    "run_plan",
    "Scenario",
    "load_scenario",
]
