"""Precomputation-based planner.

1. For every border vertex, shortest traversal times through the risk
   subgraph to every other border vertex (``BorderTable``).
2. An augmented graph over Safe and Border vertices where each reachable
   border pair gets a direct edge weighted by the cost of one excursion of
   that duration.
3. Plain Dijkstra on the augmented graph; excursion edges are expanded back
   into refined-roadmap vertices for the returned path.

Step 1 dominates the running time and needs O(n_B * |risk subgraph|) memory,
so the table size is estimated up front and checked against a budget.
"""
from __future__ import annotations

import heapq
import math
import queue
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .baselines import dijkstra
from .config import PlannerOptions
from .errors import InvalidQuery, MemoryBudgetExceeded, UnsupportedQuery
from .log_utils import LogFn, null_log
from .results import PathResult, SearchStats, build_result
from .roadmap import RefinedRoadmap
from .world import Zone

_NO_PRED = -1
_BYTES_PER_CELL = 8 + 4  # float64 distance + int32 predecessor


@dataclass(eq=False)
class BorderTable:
    """Risk-restricted distances from every border vertex.

    ``nodes`` lists the refined vertices of the risk subgraph (Risk and Border
    vertices); row ``i`` of ``distances``/``predecessors`` belongs to source
    ``border_ids[i]`` and is indexed by position in ``nodes``.
    """

    border_ids: Tuple[int, ...]
    nodes: Tuple[int, ...]
    distances: np.ndarray
    predecessors: np.ndarray
    _row: Dict[int, int] = field(default_factory=dict, repr=False)
    _col: Dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._row = {b: i for i, b in enumerate(self.border_ids)}
        self._col = {v: j for j, v in enumerate(self.nodes)}

    @property
    def nbytes(self) -> int:
        return int(self.distances.nbytes + self.predecessors.nbytes)

    def lookup(self, b1: int, b2: int) -> float:
        row, col = self._row.get(b1), self._col.get(b2)
        if row is None or col is None:
            return math.inf
        return float(self.distances[row, col])

    def border_matrix(self) -> np.ndarray:
        """n_B x n_B matrix of border-to-border traversal times."""
        cols = [self._col[b] for b in self.border_ids]
        return self.distances[:, cols]

    def path(self, b1: int, b2: int) -> List[int]:
        """Refined vertices of the stored shortest risk path from ``b1`` to ``b2``."""
        if not math.isfinite(self.lookup(b1, b2)):
            raise InvalidQuery(f"border vertices {b1} and {b2} are not risk-connected")
        row = self.predecessors[self._row[b1]]
        j = self._col[b2]
        out = [self.nodes[j]]
        while self.nodes[j] != b1:
            j = int(row[j])
            out.append(self.nodes[j])
        out.reverse()
        return out


def estimate_table_bytes(g: RefinedRoadmap) -> int:
    risk_nodes = sum(1 for z in g.zones if z is Zone.RISK or z is Zone.BORDER)
    return g.n_border * risk_nodes * _BYTES_PER_CELL


def _risk_subgraph(g: RefinedRoadmap) -> Tuple[Tuple[int, ...], List[List[Tuple[int, float]]]]:
    nodes = tuple(v for v, z in enumerate(g.zones) if z is Zone.RISK or z is Zone.BORDER)
    col = {v: j for j, v in enumerate(nodes)}
    local: List[List[Tuple[int, float]]] = [[] for _ in nodes]
    for j, v in enumerate(nodes):
        for edge in g.adjacency[v]:
            if edge.zone is Zone.RISK:
                local[j].append((col[edge.target], edge.length))
    return nodes, local


def _single_source(local: List[List[Tuple[int, float]]], source: int,
                   dist_row: np.ndarray, pred_row: np.ndarray) -> None:
    dist = [math.inf] * len(local)
    pred = [_NO_PRED] * len(local)
    done = [False] * len(local)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in local[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    dist_row[:] = dist
    pred_row[:] = pred


def risk_restricted_apsp(
    g: RefinedRoadmap,
    *,
    workers: int = 1,
    memory_budget_bytes: Optional[int] = None,
    clean_log: Optional[LogFn] = None,
) -> BorderTable:
    """Dijkstra from every border vertex over Risk edges only.

    Sources are independent; with ``workers > 1`` they are handed out to a
    thread pool through a queue and each worker fills its own rows.
    """
    log = clean_log or null_log
    estimate = estimate_table_bytes(g)
    if memory_budget_bytes is not None and estimate > memory_budget_bytes:
        log(f"Border table needs ~{estimate / 1e6:.1f} MB, budget is "
            f"{memory_budget_bytes / 1e6:.1f} MB", "⚠️")
        raise MemoryBudgetExceeded(estimate, memory_budget_bytes)

    nodes, local = _risk_subgraph(g)
    col = {v: j for j, v in enumerate(nodes)}
    borders = tuple(g.border_ids)
    distances = np.full((len(borders), len(nodes)), np.inf)
    predecessors = np.full((len(borders), len(nodes)), _NO_PRED, dtype=np.int32)
    log(f"Border table: {len(borders)} sources over {len(nodes)} risk vertices "
        f"(~{estimate / 1e6:.1f} MB)", "🧮", show_always=False)

    if workers <= 1 or len(borders) < 2:
        for i, b in enumerate(borders):
            _single_source(local, col[b], distances[i], predecessors[i])
    else:
        tasks: "queue.Queue[int]" = queue.Queue()
        for i in range(len(borders)):
            tasks.put(i)
        errors: List[BaseException] = []
        errors_lock = threading.Lock()

        def _apsp_worker() -> None:
            while True:
                try:
                    i = tasks.get_nowait()
                except queue.Empty:
                    return
                try:
                    _single_source(local, col[borders[i]], distances[i], predecessors[i])
                except BaseException as exc:  # surfaced after join
                    with errors_lock:
                        errors.append(exc)
                finally:
                    tasks.task_done()

        pool = [
            threading.Thread(target=_apsp_worker, daemon=True, name=f"ApspWorker-{k + 1}")
            for k in range(min(workers, len(borders)))
        ]
        for worker in pool:
            worker.start()
        for worker in pool:
            worker.join()
        if errors:
            raise errors[0]
    return BorderTable(borders, nodes, distances, predecessors)


@dataclass
class AugmentedGraph:
    """Safe and Border vertices with safe, stub and excursion edges.

    ``adjacency[v]`` maps neighbor -> (weight, kind); parallel edges keep the
    lighter one. Risk vertices have empty adjacency.
    """

    vertices: Tuple[int, ...]
    adjacency: List[Dict[int, Tuple[float, str]]]
    edge_counts: Dict[str, int]

    def neighbors(self, u: int):
        for v, (w, _kind) in self.adjacency[u].items():
            yield v, w

    def kind(self, u: int, v: int) -> str:
        return self.adjacency[u][v][1]


def build_augmented_graph(g: RefinedRoadmap, table: BorderTable, alpha: float = 1.0) -> AugmentedGraph:
    adjacency: List[Dict[int, Tuple[float, str]]] = [dict() for _ in range(len(g))]
    counts = {"safe": 0, "stub": 0, "risk": 0}

    def add(u: int, v: int, w: float, kind: str) -> None:
        current = adjacency[u].get(v)
        if current is None:
            counts[kind] += 1
        elif current[0] <= w:
            return
        else:
            counts[current[1]] -= 1
            counts[kind] += 1
        adjacency[u][v] = (w, kind)
        adjacency[v][u] = (w, kind)

    vertices = tuple(v for v, z in enumerate(g.zones) if z is not Zone.RISK)
    for u in vertices:
        for edge in g.adjacency[u]:
            if edge.zone is Zone.SAFE and u < edge.target:
                both_safe = g.zones[u] is Zone.SAFE and g.zones[edge.target] is Zone.SAFE
                add(u, edge.target, edge.length, "safe" if both_safe else "stub")

    matrix = table.border_matrix()
    rows, cols = np.nonzero(np.isfinite(matrix) & (matrix > 0))
    borders = table.border_ids
    for i, j in zip(rows.tolist(), cols.tolist()):
        if i < j:
            add(borders[i], borders[j], math.expm1(alpha * float(matrix[i, j])) / alpha, "risk")
    return AugmentedGraph(vertices, adjacency, counts)


def _expand_path(aug: AugmentedGraph, table: BorderTable, path: Sequence[int]) -> List[int]:
    out = [path[0]]
    for u, v in zip(path, path[1:]):
        if aug.kind(u, v) == "risk":
            out.extend(table.path(u, v)[1:])
        else:
            out.append(v)
    return out


# ------------------------------------------------------------------
# Public API
# ------------------------------------------------------------------
def precompute_search(
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    options: Optional[PlannerOptions] = None,
    clean_log: Optional[LogFn] = None,
    *,
    table: Optional[BorderTable] = None,
) -> PathResult:
    """Border table, augmented graph, then Dijkstra. Safe endpoints only.

    A prebuilt ``table`` skips the first phase (its time is then reported as 0).
    """
    options = options or PlannerOptions(algorithm="precompute")
    log = clean_log or null_log
    for name, v in (("start", xs), ("goal", xg)):
        if not isinstance(v, int) or not 0 <= v < len(g):
            raise InvalidQuery(f"{name} vertex {v!r} is not a roadmap vertex")
        if g.zones[v] is Zone.RISK:
            raise UnsupportedQuery(f"{name} vertex {g.label(v)} is inside a risk region")
        if g.zones[v] is Zone.OBSTACLE:
            raise InvalidQuery(f"{name} vertex {v} lies in an obstacle")

    t0 = time.perf_counter()
    if table is None:
        table = risk_restricted_apsp(g, workers=options.apsp_workers,
                                     memory_budget_bytes=options.memory_budget_bytes,
                                     clean_log=log)
    t1 = time.perf_counter()
    aug = build_augmented_graph(g, table, options.alpha)
    t2 = time.perf_counter()
    tree = dijkstra(aug.neighbors, xs, xg, zero=0.0)
    t3 = time.perf_counter()

    stats: SearchStats = tree.stats
    stats.wall_time = t3 - t0
    stats.phases = {"apsp": t1 - t0, "build": t2 - t1, "search": t3 - t2}
    metadata = {
        "alpha": options.alpha,
        "n_border": g.n_border,
        "table_bytes": table.nbytes,
        "apsp_share": (t1 - t0) / stats.wall_time if stats.wall_time > 0 else 0.0,
        "augmented_edges": dict(aug.edge_counts),
    }
    path = tree.path_to(xg)
    if path is None:
        log(f"precompute: goal {g.label(xg)} unreachable from {g.label(xs)}", "⚠️")
        return build_result("precompute", g, None, options.alpha, stats=stats, metadata=metadata)
    log(f"precompute: cost {tree.dist[xg]:.6g}, border table {table.nbytes / 1e6:.1f} MB, "
        f"APSP {metadata['apsp_share']:.0%} of {stats.wall_time:.2f}s", "🧮", show_always=False)
    return build_result("precompute", g, _expand_path(aug, table, path), options.alpha,
                        search_cost=tree.dist[xg], stats=stats, metadata=metadata)


__all__ = [
    "BorderTable",
    "AugmentedGraph",
    "estimate_table_bytes",
    "risk_restricted_apsp",
    "build_augmented_graph",
    "precompute_search",
]
