"""Brute-force ground truth for small roadmaps.

Exposure resets at every Safe or Border vertex, so a route may come back to a
Risk vertex in a later excursion and arrive there less exposed. Optima and
non-dominated label sets are therefore taken over walks that never repeat a
Safe or Border vertex and never repeat a Risk vertex inside one excursion;
any other walk contains a loop whose removal lowers both cost and exposure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx

from .config import PlannerOptions
from .cost import COST_RTOL, path_cost
from .errors import InstanceTooLarge, InvalidQuery, Unreachable, UnsupportedQuery
from .planner import run_algorithm
from .roadmap import RefinedRoadmap
from .world import Zone

DEFAULT_MAX_VERTICES = 14


@dataclass
class UsefulSet:
    vertex: int
    members: List[Tuple[float, float, List[int]]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    def pairs(self) -> List[Tuple[float, float]]:
        return [(c, lam) for c, lam, _ in self.members]


def to_networkx(g: RefinedRoadmap) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(g)))
    for u, items in enumerate(g.adjacency):
        for edge in items:
            if u < edge.target:
                graph.add_edge(u, edge.target, length=edge.length, zone=edge.zone.value)
    return graph


def _check_instance(g: RefinedRoadmap, xs: int, u: int, max_vertices: int) -> None:
    if len(g) > max_vertices:
        raise InstanceTooLarge(f"{len(g)} vertices exceeds the oracle cap of {max_vertices}")
    for v in (xs, u):
        if not 0 <= v < len(g):
            raise InvalidQuery(f"vertex {v} is not a roadmap vertex")


def enumerate_simple_paths(
    g: RefinedRoadmap, xs: int, u: int, max_vertices: int = DEFAULT_MAX_VERTICES
) -> List[List[int]]:
    _check_instance(g, xs, u, max_vertices)
    if xs == u:
        return [[xs]]
    return sorted(nx.all_simple_paths(to_networkx(g), xs, u))


def enumerate_walks(
    g: RefinedRoadmap, xs: int, u: int, max_vertices: int = DEFAULT_MAX_VERTICES
) -> List[List[int]]:
    """Walks from ``xs`` to ``u`` that are simple between exposure resets.

    Safe and Border vertices appear at most once per walk; a Risk vertex may
    reappear, but only in a different excursion. Every simple path is included.
    """
    _check_instance(g, xs, u, max_vertices)
    zones = g.zones
    walks: List[List[int]] = []
    walk = [xs]
    start_risky = zones[xs] is Zone.RISK
    settled = set() if start_risky else {xs}

    def visit(v: int, excursion: set) -> None:
        if v == u:
            walks.append(list(walk))
            if zones[v] is not Zone.RISK:
                return
        for edge in g.adjacency[v]:
            w = edge.target
            if zones[w] is Zone.RISK:
                if w in excursion:
                    continue
                excursion.add(w)
                walk.append(w)
                visit(w, excursion)
                walk.pop()
                excursion.discard(w)
            else:
                if w in settled:
                    continue
                settled.add(w)
                walk.append(w)
                visit(w, set())
                walk.pop()
                settled.discard(w)

    visit(xs, {xs} if start_risky else set())
    return sorted(walks)


def _final_lambda(g: RefinedRoadmap, path: List[int], alpha: float) -> Tuple[float, float]:
    breakdown = path_cost(g, path, alpha)
    lam = breakdown.final_lambda if g.zones[path[-1]] is Zone.RISK else 0.0
    return breakdown.total_cost, lam


def brute_force_optimum(
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    alpha: float = 1.0,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> Tuple[float, List[int]]:
    best: Optional[Tuple[float, List[int]]] = None
    for path in enumerate_walks(g, xs, xg, max_vertices):
        cost = path_cost(g, path, alpha).total_cost
        if best is None or cost < best[0]:
            best = (cost, path)
    if best is None:
        raise Unreachable(f"no path from {g.label(xs)} to {g.label(xg)}")
    return best


def useful_set(
    g: RefinedRoadmap,
    xs: int,
    u: int,
    alpha: float = 1.0,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> UsefulSet:
    """Non-dominated (cost, exposure) pairs over all walks to ``u``."""
    scored = []
    for path in enumerate_walks(g, xs, u, max_vertices):
        cost, lam = _final_lambda(g, path, alpha)
        scored.append((cost, lam, path))
    scored.sort(key=lambda item: (item[0], item[1], item[2]))
    frontier = UsefulSet(u)
    lowest = math.inf
    for cost, lam, path in scored:
        if lam < lowest:
            frontier.members.append((cost, lam, path))
            lowest = lam
    return frontier


def on_frontier(frontier: UsefulSet, cost: float, lam: float, rtol: float = COST_RTOL) -> bool:
    """True when (cost, lam) matches a frontier member within tolerance."""
    for c, l, _ in frontier.members:
        if math.isclose(c, cost, rel_tol=rtol, abs_tol=rtol) and math.isclose(l, lam, rel_tol=rtol, abs_tol=rtol):
            return True
    return False


def cross_check(
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    options: Optional[PlannerOptions] = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> Dict[str, Any]:
    """Compare every risk-aware planner against the brute-force optimum."""
    options = options or PlannerOptions()
    try:
        expected, path = brute_force_optimum(g, xs, xg, options.alpha, max_vertices)
    except Unreachable:
        expected, path = math.inf, []
    report: Dict[str, Any] = {"oracle_cost": expected, "oracle_path": path, "algorithms": {}, "ok": True}
    for algorithm in ("incremental", "astar", "precompute"):
        try:
            result = run_algorithm(algorithm, g, xs, xg, options.with_changes(algorithm=algorithm))
        except UnsupportedQuery as exc:
            report["algorithms"][algorithm] = {"skipped": str(exc)}
            continue
        agrees = (
            (not result.reachable and math.isinf(expected))
            or math.isclose(result.cost, expected, rel_tol=COST_RTOL, abs_tol=COST_RTOL)
        )
        report["algorithms"][algorithm] = {"cost": result.cost, "path": result.path, "agrees": agrees}
        report["ok"] = report["ok"] and agrees
    return report


__all__ = [
    "DEFAULT_MAX_VERTICES",
    "UsefulSet",
    "to_networkx",
    "enumerate_simple_paths",
    "enumerate_walks",
    "brute_force_optimum",
    "useful_set",
    "on_frontier",
    "cross_check",
]
