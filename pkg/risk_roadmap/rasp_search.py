"""Incremental minimal-cost search over risk-aware labels.

A generalized Dijkstra whose labels carry the exposure accumulated since the
last risk entry. Labels at a vertex are split into channels keyed by the
border vertex through which the current excursion started (``phi``); Safe and
Border vertices only ever have the ``phi=None`` channel, so each of them is
finalized at most once. Labels dominated by another live label at the same
vertex (no cheaper, no less exposed) are dropped on insertion.
"""
from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Set, Tuple, Union

from .config import PlannerOptions
from .errors import CollisionError, InternalError, InvalidComparison, InvalidQuery
from .log_utils import LogFn, null_log
from .results import PathResult, SearchStats, TraceEvent, build_result
from .roadmap import BorderEdge, RefinedEdge, RefinedRoadmap
from .world import Zone

# Channel id used when the search starts inside a risk region.
START_BORDER = -1

ChannelKey = Tuple[int, Optional[int]]
Heuristic = Callable[[int], float]


@dataclass(eq=False)
class RaspEntry:
    u: int
    c: float
    t: float
    lam: float
    parent: Optional["RaspEntry"] = None
    phi: Optional[int] = None

    @property
    def key(self) -> ChannelKey:
        return (self.u, self.phi)

    def path(self) -> List[int]:
        out = []
        node: Optional[RaspEntry] = self
        while node is not None:
            out.append(node.u)
            node = node.parent
        out.reverse()
        return out


def _phi_rank(phi: Optional[int]) -> int:
    return -2 if phi is None else phi


class SearchQueue:
    """Min-priority queue addressed by channel key.

    Decrease-priority pushes a fresh heap item and leaves the old one behind;
    ``extract_min`` skips items that are no longer the current one for their key.
    Ties break on (exposure, vertex id, phi id).
    """

    def __init__(self) -> None:
        self._heap: List[tuple] = []
        self._current: Dict[ChannelKey, tuple] = {}
        self._seq = itertools.count()

    def __len__(self) -> int:
        return len(self._current)

    def __contains__(self, key: ChannelKey) -> bool:
        return key in self._current

    def add_with_priority(self, entry: RaspEntry, priority: float) -> None:
        key = entry.key
        if key in self._current:
            raise InternalError(f"channel {key} is already queued")
        self._push(entry, priority)

    def decrease_priority(self, entry: RaspEntry, priority: float) -> None:
        key = entry.key
        current = self._current.get(key)
        if current is None:
            raise InternalError(f"channel {key} is not queued")
        if priority > current[0]:
            raise InternalError(f"priority of {key} would increase")
        self._push(entry, priority)

    def remove(self, key: ChannelKey) -> None:
        self._current.pop(key, None)

    def extract_min(self) -> Tuple[float, RaspEntry]:
        while self._heap:
            item = heapq.heappop(self._heap)
            entry = item[-1]
            if self._current.get(entry.key) is item:
                del self._current[entry.key]
                return item[0], entry
        raise IndexError("extract_min from an empty queue")

    def _push(self, entry: RaspEntry, priority: float) -> None:
        item = (priority, entry.lam, entry.u, _phi_rank(entry.phi), next(self._seq), entry)
        self._current[entry.key] = item
        heapq.heappush(self._heap, item)


# ----------------------------------------------------------------------
# Label algebra
# ----------------------------------------------------------------------
def _risk_cost(lam: float, delta: float, alpha: float) -> float:
    return math.exp(alpha * lam) * math.expm1(alpha * delta) / alpha


def expand(
    tau: RaspEntry,
    edge: Union[RefinedEdge, BorderEdge],
    zones: List[Zone],
    alpha: float = 1.0,
) -> RaspEntry:
    """Child label of ``tau`` after traversing ``edge``.

    Refined edges are zone-pure, so only safe->safe, border->risk, risk->risk
    and risk->border moves occur. A ``BorderEdge`` straddles safe and risk with
    an interior border point and is charged piecewise around it.
    """
    u, v = tau.u, edge.target
    zu, zv = zones[u], zones[v]
    if zu is Zone.OBSTACLE or zv is Zone.OBSTACLE:
        raise CollisionError(f"edge ({u}, {v}) touches an obstacle")
    delta = edge.length
    t = tau.t + delta

    if isinstance(edge, BorderEdge):
        before, after = edge.split, delta - edge.split
        if zu is not Zone.RISK and zv is Zone.RISK:
            if tau.lam != 0:
                raise InternalError(f"label at non-risk vertex {u} carries exposure")
            c = tau.c + before + _risk_cost(0.0, after, alpha)
            return RaspEntry(v, c, t, after, tau, edge.border)
        if zu is Zone.RISK and zv is not Zone.RISK:
            c = tau.c + _risk_cost(tau.lam, before, alpha) + after
            return RaspEntry(v, c, t, 0.0, tau, None)
        raise InternalError(f"edge ({u}, {v}) does not straddle a border")

    if edge.zone is Zone.SAFE:
        if zu is Zone.RISK or zv is Zone.RISK or tau.lam != 0:
            raise InternalError(f"safe edge ({u}, {v}) touches risk")
        return RaspEntry(v, tau.c + delta, t, 0.0, tau, None)
    if edge.zone is not Zone.RISK:
        raise InternalError(f"edge ({u}, {v}) has zone {edge.zone.value}")
    if zu is Zone.SAFE or zv is Zone.SAFE:
        raise InternalError(f"risk edge ({u}, {v}) ends at a safe vertex")
    if zu is Zone.RISK:
        phi, lam = tau.phi, tau.lam
    else:
        if tau.lam != 0:
            raise InternalError(f"label at border vertex {u} carries exposure")
        phi, lam = u, 0.0
    c = tau.c + _risk_cost(lam, delta, alpha)
    if zv is Zone.RISK:
        return RaspEntry(v, c, t, lam + delta, tau, phi)
    return RaspEntry(v, c, t, 0.0, tau, None)


def dominates(a: RaspEntry, b: RaspEntry) -> bool:
    if a.u != b.u:
        raise InvalidComparison(f"cannot compare labels at vertices {a.u} and {b.u}")
    return a.c <= b.c and a.lam <= b.lam


# ----------------------------------------------------------------------
# Search core
# ----------------------------------------------------------------------
def euclidean_heuristic(g: RefinedRoadmap, xg: int) -> Heuristic:
    """Straight-line distance to ``xg``, scaled down if any edge is shorter than its chord.

    Every edge costs at least its length, so the scaled distance is consistent.
    """
    scale = 1.0
    for u, items in enumerate(g.adjacency):
        pu = g.points[u]
        for edge in items:
            chord = math.dist(pu, g.points[edge.target])
            if chord > 0 and edge.length < chord * scale:
                scale = edge.length / chord
    goal = g.points[xg]
    return lambda v: scale * math.dist(g.points[v], goal)


def _zero(_v: int) -> float:
    return 0.0


def _validate_query(g: RefinedRoadmap, xs: int, xg: Optional[int]) -> None:
    for name, v in (("start", xs), ("goal", xg)):
        if v is None and name == "goal":
            continue
        if not isinstance(v, int) or not 0 <= v < len(g):
            raise InvalidQuery(f"{name} vertex {v!r} is not a roadmap vertex")
        if g.zones[v] is Zone.OBSTACLE:
            raise InvalidQuery(f"{name} vertex {v} lies in an obstacle")


class _SearchState:
    def __init__(self, g: RefinedRoadmap, options: PlannerOptions, heuristic: Heuristic) -> None:
        self.g = g
        self.options = options
        self.heuristic = heuristic
        self.queue = SearchQueue()
        self.labels: List[Dict[Optional[int], RaspEntry]] = [dict() for _ in range(len(g))]
        self.closed: Set[ChannelKey] = set()
        self.finalized: Dict[int, List[RaspEntry]] = {}
        self.stats = SearchStats()
        self.trace: Optional[List[TraceEvent]] = [] if options.trace else None

    def record(self, event: str, entry: RaspEntry) -> None:
        if self.trace is not None:
            self.trace.append(TraceEvent(event, entry.u, entry.phi, entry.c))

    def offer(self, child: RaspEntry) -> None:
        key = child.key
        if key in self.closed:
            return
        slot = self.labels[child.u]
        existing = slot.get(child.phi)
        if existing is not None and not child.c < existing.c:
            return
        if self.options.domination_pruning:
            for phi, other in slot.items():
                if phi != child.phi and dominates(other, child):
                    self.stats.pruned += 1
                    self.record("prune", child)
                    return
        priority = child.c + self.heuristic(child.u)
        slot[child.phi] = child
        if existing is None:
            self.queue.add_with_priority(child, priority)
            self.stats.pushes += 1
            self.record("push", child)
        else:
            self.queue.decrease_priority(child, priority)
            self.stats.decreases += 1
            self.record("decrease", child)
        if self.options.evict_dominated:
            for phi, other in list(slot.items()):
                if phi == child.phi or (child.u, phi) in self.closed:
                    continue
                if dominates(child, other):
                    del slot[phi]
                    self.queue.remove((child.u, phi))
                    self.stats.evicted += 1
                    self.record("evict", other)
        self.stats.queue_peak = max(self.stats.queue_peak, len(self.queue))
        self.stats.live_channels_peak = max(self.stats.live_channels_peak, len(slot))

    def run(self, xs: int, xg: Optional[int]) -> Optional[RaspEntry]:
        phi = START_BORDER if self.g.zones[xs] is Zone.RISK else None
        self.offer(RaspEntry(xs, 0.0, 0.0, 0.0, None, phi))
        alpha = self.options.alpha
        zones = self.g.zones
        while len(self.queue):
            _, tau = self.queue.extract_min()
            self.closed.add(tau.key)
            self.finalized.setdefault(tau.u, []).append(tau)
            self.stats.expansions += 1
            self.record("pop", tau)
            if tau.u == xg:
                return tau
            for edge in self.g.adjacency[tau.u]:
                self.offer(expand(tau, edge, zones, alpha))
        return None


def _resolve_heuristic(
    g: RefinedRoadmap, xg: Optional[int], heuristic: Union[str, Heuristic, None]
) -> Heuristic:
    if callable(heuristic):
        return heuristic
    if heuristic in (None, "none", "zero") or xg is None:
        return _zero
    if heuristic == "euclidean":
        return euclidean_heuristic(g, xg)
    raise InvalidQuery(f"unknown heuristic '{heuristic}'")


def _search(
    algorithm: str,
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    options: PlannerOptions,
    heuristic: Heuristic,
    clean_log: LogFn,
) -> PathResult:
    _validate_query(g, xs, xg)
    state = _SearchState(g, options, heuristic)
    started = time.perf_counter()
    goal = state.run(xs, xg)
    state.stats.wall_time = time.perf_counter() - started
    metadata = {"alpha": options.alpha, "n_border": g.n_border,
                "domination_pruning": options.domination_pruning}
    if goal is None:
        clean_log(f"{algorithm}: goal {g.label(xg)} unreachable from {g.label(xs)}", "⚠️")
        return build_result(algorithm, g, None, options.alpha, stats=state.stats,
                            trace=state.trace, metadata=metadata)
    clean_log(
        f"{algorithm}: cost {goal.c:.6g} after {state.stats.expansions} expansions "
        f"({state.stats.wall_time * 1000:.2f} ms)",
        "🧭",
        show_always=False,
    )
    return build_result(algorithm, g, goal.path(), options.alpha, search_cost=goal.c,
                        stats=state.stats, trace=state.trace, metadata=metadata)


# ------------------------------------------------------------------
# Public API
# ------------------------------------------------------------------
def incremental_search(
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    options: Optional[PlannerOptions] = None,
    clean_log: Optional[LogFn] = None,
) -> PathResult:
    options = options or PlannerOptions()
    return _search("incremental", g, xs, xg, options, _zero, clean_log or null_log)


def astar_search(
    g: RefinedRoadmap,
    xs: int,
    xg: int,
    heuristic: Union[str, Heuristic, None] = "euclidean",
    options: Optional[PlannerOptions] = None,
    clean_log: Optional[LogFn] = None,
) -> PathResult:
    options = options or PlannerOptions(algorithm="astar")
    _validate_query(g, xs, xg)
    h = _resolve_heuristic(g, xg, heuristic)
    return _search("astar", g, xs, xg, options, h, clean_log or null_log)


def finalized_labels(
    g: RefinedRoadmap, xs: int, options: Optional[PlannerOptions] = None
) -> Dict[int, List[RaspEntry]]:
    """Run the search to exhaustion and return every popped label per vertex."""
    options = options or PlannerOptions()
    _validate_query(g, xs, None)
    state = _SearchState(g, options, _zero)
    state.run(xs, None)
    return state.finalized


def iter_channels(labels: Dict[int, List[RaspEntry]]) -> Iterator[Tuple[ChannelKey, RaspEntry]]:
    for entries in labels.values():
        for entry in entries:
            yield entry.key, entry


__all__ = [
    "START_BORDER",
    "RaspEntry",
    "SearchQueue",
    "expand",
    "dominates",
    "euclidean_heuristic",
    "incremental_search",
    "astar_search",
    "finalized_labels",
    "iter_channels",
]
