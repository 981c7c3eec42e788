"""Reference planners: plain shortest path and minimal-risk path.

Both run on the refined roadmap so risk time is exact per edge, and both
share one heap-based Dijkstra with the incremental planner's tie-break
(cost first, then vertex id) so that on risk-free worlds their traces line up.
"""
from __future__ import annotations

import heapq
import itertools
import time
from typing import Callable, Dict, Generic, Iterable, List, NamedTuple, Optional, Tuple, TypeVar

from .config import PlannerOptions
from .errors import InvalidQuery
from .log_utils import LogFn, null_log
from .results import PathResult, SearchStats, TraceEvent, build_result
from .roadmap import RefinedRoadmap
from .world import Zone

W = TypeVar("W")


class LexCost(NamedTuple):
    """(time inside risk, total length), compared lexicographically."""

    risk_time: float
    length: float

    def __add__(self, other: "LexCost") -> "LexCost":  # type: ignore[override]
        return LexCost(self.risk_time + other.risk_time, self.length + other.length)


class ShortestPathTree(Generic[W]):
    def __init__(self) -> None:
        self.dist: Dict[int, W] = {}
        self.parent: Dict[int, Optional[int]] = {}
        self.stats = SearchStats()
        self.trace: Optional[List[TraceEvent]] = None

    def path_to(self, v: int) -> Optional[List[int]]:
        if v not in self.parent:
            return None
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        out.reverse()
        return out


def dijkstra(
    neighbors: Callable[[int], Iterable[Tuple[int, W]]],
    xs: int,
    xg: Optional[int],
    *,
    zero: W,
    trace: bool = False,
    scalar: Callable[[W], float] = float,
) -> ShortestPathTree[W]:
    """Heap Dijkstra with lazy deletion; stops once ``xg`` is popped.

    ``dist`` and ``parent`` only hold settled vertices when the goal is reached
    early; use ``path_to(xg)`` for the answer.
    """
    tree: ShortestPathTree[W] = ShortestPathTree()
    if trace:
        tree.trace = []
    stats = tree.stats
    best: Dict[int, W] = {xs: zero}
    parent: Dict[int, Optional[int]] = {xs: None}
    closed = set()
    seq = itertools.count()
    heap: List[tuple] = [(zero, xs, next(seq))]
    live = {xs: heap[0]}

    def record(event: str, v: int, d: W) -> None:
        if tree.trace is not None:
            tree.trace.append(TraceEvent(event, v, None, scalar(d)))

    record("push", xs, zero)
    stats.pushes = 1
    stats.queue_peak = 1
    while heap:
        item = heapq.heappop(heap)
        d, u, _ = item
        if live.get(u) is not item:
            continue
        del live[u]
        closed.add(u)
        tree.dist[u] = d
        tree.parent[u] = parent[u]
        stats.expansions += 1
        record("pop", u, d)
        if u == xg:
            break
        for v, w in neighbors(u):
            if v in closed:
                continue
            nd = d + w
            known = best.get(v)
            if known is not None and not nd < known:
                continue
            best[v] = nd
            parent[v] = u
            entry = (nd, v, next(seq))
            live[v] = entry
            heapq.heappush(heap, entry)
            if known is None:
                stats.pushes += 1
                record("push", v, nd)
            else:
                stats.decreases += 1
                record("decrease", v, nd)
            stats.queue_peak = max(stats.queue_peak, len(live))
    stats.live_channels_peak = 1 if stats.expansions else 0
    return tree


def _validate(g: RefinedRoadmap, xs: int, xg: int) -> None:
    for name, v in (("start", xs), ("goal", xg)):
        if not isinstance(v, int) or not 0 <= v < len(g):
            raise InvalidQuery(f"{name} vertex {v!r} is not a roadmap vertex")
        if g.zones[v] is Zone.OBSTACLE:
            raise InvalidQuery(f"{name} vertex {v} lies in an obstacle")


def _finish(
    algorithm: str,
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    tree: ShortestPathTree,
    started: float,
    options: PlannerOptions,
    clean_log: LogFn,
    metadata: Dict[str, object],
) -> PathResult:
    tree.stats.wall_time = time.perf_counter() - started
    path = tree.path_to(xg)
    if path is None:
        clean_log(f"{algorithm}: goal {g.label(xg)} unreachable from {g.label(xs)}", "⚠️")
    result = build_result(algorithm, g, path, options.alpha, stats=tree.stats,
                          trace=tree.trace, metadata=metadata)
    if path is not None:
        result.search_cost = result.breakdown.total_cost
        clean_log(f"{algorithm}: length {result.length:.6g}, risk time "
                  f"{result.breakdown.risk_time:.6g}", "🧭", show_always=False)
    return result


# ------------------------------------------------------------------
# Public API
# ------------------------------------------------------------------
def dijkstra_shortest(
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    options: Optional[PlannerOptions] = None,
    clean_log: Optional[LogFn] = None,
) -> PathResult:
    """Minimum-length path ignoring risk; ``search_cost`` is its risk-aware cost."""
    options = options or PlannerOptions(algorithm="dijkstra")
    _validate(g, xs, xg)
    started = time.perf_counter()
    tree = dijkstra(lambda u: ((e.target, e.length) for e in g.adjacency[u]), xs, xg,
                    zero=0.0, trace=options.trace)
    return _finish("dijkstra", g, xs, xg, tree, started, options, clean_log or null_log,
                   {"alpha": options.alpha, "tie_break": "length, vertex id"})


def min_risk_path(
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    options: Optional[PlannerOptions] = None,
    clean_log: Optional[LogFn] = None,
) -> PathResult:
    """Least time inside risk, ties broken by total length."""
    options = options or PlannerOptions(algorithm="minrisk")
    _validate(g, xs, xg)

    def neighbors(u: int):
        for e in g.adjacency[u]:
            risk = e.length if e.zone is Zone.RISK else 0.0
            yield e.target, LexCost(risk, e.length)

    started = time.perf_counter()
    tree = dijkstra(neighbors, xs, xg, zero=LexCost(0.0, 0.0), trace=options.trace,
                    scalar=lambda w: w.risk_time)
    return _finish("minrisk", g, xs, xg, tree, started, options, clean_log or null_log,
                   {"alpha": options.alpha, "tie_break": "risk_time, length, vertex id"})


__all__ = ["LexCost", "ShortestPathTree", "dijkstra", "dijkstra_shortest", "min_risk_path"]
