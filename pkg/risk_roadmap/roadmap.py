"""Embedded roadmaps over a world and their border-point refinement.

``Roadmap`` is the plain undirected graph (grid lattice, Halton PRM or an
explicit graph loaded from JSON). ``refine`` inserts a border vertex at every
safe/risk crossing of every edge so the resulting ``RefinedRoadmap`` only has
zone-pure edges; every planner in the package runs on the refined graph.

Vertex ordering is deterministic: grid row-major, Halton sequence order, and
border vertices appended in (edge id, crossing param) order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree
from scipy.stats import qmc

from .errors import CollisionError, EmptyRoadmap, InvalidParameter, InvalidQuery, ScenarioParseError
from .world import CrossingDirection, GridWorld, Point, PolygonWorld, World, Zone

VertexRef = Union[int, str]


class RefinedEdge(NamedTuple):
    """Zone-pure edge of a refined roadmap, stored once per direction."""

    target: int
    length: float
    zone: Zone


class BorderEdge(NamedTuple):
    """Original edge straddling safe and risk with a single interior border point.

    ``split`` is the length from the source vertex to the border point ``border``.
    """

    target: int
    length: float
    split: float
    border: int


@dataclass
class Roadmap:
    points: List[Point]
    zones: List[Zone]
    edges: List[Tuple[int, int, float]]
    start: Optional[int] = None
    goal: Optional[int] = None
    names: Optional[List[str]] = None
    cells: Optional[List[Tuple[int, int]]] = None
    # explicit graphs: edge id -> border position as a fraction from the Safe endpoint
    crossing_hints: Dict[int, float] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.points)
        if len(self.zones) != n:
            raise InvalidParameter("points and zones must have the same length")
        self.zones = [Zone(z) for z in self.zones]
        for i, zone in enumerate(self.zones):
            if zone not in (Zone.SAFE, Zone.RISK):
                raise InvalidParameter(f"roadmap vertex {i} has zone {zone.value}; expected safe or risk")
        self.adjacency: List[List[Tuple[int, float, int]]] = [[] for _ in range(n)]
        seen = set()
        for edge_id, (u, v, length) in enumerate(self.edges):
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidParameter(f"edge {edge_id} references a missing vertex")
            if u == v:
                raise InvalidParameter(f"edge {edge_id} is a self loop")
            if not length > 0:
                raise InvalidParameter(f"edge {edge_id} has non-positive length {length}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidParameter(f"duplicate edge {key}")
            seen.add(key)
            self.adjacency[u].append((v, float(length), edge_id))
            self.adjacency[v].append((u, float(length), edge_id))
        for name in ("start", "goal"):
            value = getattr(self, name)
            if value is not None and not 0 <= value < n:
                raise InvalidParameter(f"{name} vertex {value} does not exist")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def vertex_id(self, ref: VertexRef) -> int:
        if isinstance(ref, str) and not ref.lstrip("-").isdigit():
            if self.names and ref in self.names:
                return self.names.index(ref)
            raise InvalidQuery(f"unknown vertex name '{ref}'")
        idx = int(ref)
        if not 0 <= idx < len(self.points):
            raise InvalidQuery(f"vertex {idx} does not exist")
        return idx

    def label(self, v: int) -> str:
        if self.names and v < len(self.names):
            return self.names[v]
        return str(v)

    # ------------------------------------------------------------------
    # Explicit-graph JSON
    # ------------------------------------------------------------------
    @classmethod
    def from_dict(cls, data: Mapping[str, Any], *, source: Optional[str] = None) -> "Roadmap":
        try:
            raw_vertices = list(data["vertices"])
            raw_edges = list(data.get("edges", []))
        except (KeyError, TypeError) as exc:
            raise ScenarioParseError(f"graph needs 'vertices' and 'edges': {exc}", source=source) from exc
        points: List[Point] = []
        zones: List[Zone] = []
        names: List[str] = []
        for i, item in enumerate(raw_vertices):
            try:
                points.append((float(item["x"]), float(item["y"])))
                zones.append(Zone(str(item.get("zone", "safe")).lower()))
            except (KeyError, TypeError, ValueError) as exc:
                raise ScenarioParseError(f"bad vertex #{i}: {exc}", source=source) from exc
            names.append(str(item.get("name", i)))
        has_names = any("name" in item for item in raw_vertices)

        def resolve(ref: Any, what: str) -> int:
            if isinstance(ref, str) and has_names and ref in names:
                return names.index(ref)
            try:
                idx = int(ref)
            except (TypeError, ValueError) as exc:
                raise ScenarioParseError(f"unknown {what} vertex {ref!r}", source=source) from exc
            if not 0 <= idx < len(points):
                raise ScenarioParseError(f"{what} vertex {idx} out of range", source=source)
            return idx

        edges: List[Tuple[int, int, float]] = []
        hints: Dict[int, float] = {}
        for i, item in enumerate(raw_edges):
            if not isinstance(item, Mapping) or "u" not in item or "v" not in item:
                raise ScenarioParseError(f"edge #{i} needs 'u' and 'v'", source=source)
            u, v = resolve(item["u"], "edge"), resolve(item["v"], "edge")
            length = item.get("length")
            if length is None:
                length = math.dist(points[u], points[v])
            edges.append((u, v, float(length)))
            if "crossing" in item:
                hint = float(item["crossing"])
                if not 0.0 <= hint < 1.0:
                    raise ScenarioParseError(f"edge #{i} crossing must be in [0, 1)", source=source)
                hints[i] = hint
        start = resolve(data["start"], "start") if data.get("start") is not None else None
        goal = resolve(data["goal"], "goal") if data.get("goal") is not None else None
        try:
            return cls(points, zones, edges, start=start, goal=goal,
                       names=names if has_names else None, crossing_hints=hints,
                       metadata={"kind": "explicit"})
        except InvalidParameter as exc:
            raise ScenarioParseError(str(exc), source=source) from exc

    def to_dict(self) -> Dict[str, Any]:
        vertices = []
        for i, ((x, y), zone) in enumerate(zip(self.points, self.zones)):
            item: Dict[str, Any] = {"x": x, "y": y, "zone": zone.value}
            if self.names:
                item["name"] = self.names[i]
            vertices.append(item)
        edges = []
        for edge_id, (u, v, length) in enumerate(self.edges):
            item = {"u": u, "v": v, "length": length}
            if edge_id in self.crossing_hints:
                item["crossing"] = self.crossing_hints[edge_id]
            edges.append(item)
        return {"vertices": vertices, "edges": edges, "start": self.start, "goal": self.goal}


# ----------------------------------------------------------------------
# Builders
# ----------------------------------------------------------------------
_OFFSETS_4 = ((0, 1), (1, 0))
_OFFSETS_8 = ((0, 1), (1, 0), (1, 1), (1, -1))


def build_grid_roadmap(world: World, connectivity: int = 8) -> Roadmap:
    """One vertex per free cell center, edges between 4- or 8-adjacent free cells.

    Diagonal edges also need both side cells free (no corner cutting), which is
    exactly the supercover collision test of ``GridWorld.segment_crossings``.
    """
    if not isinstance(world, GridWorld):
        raise InvalidParameter("grid roadmaps need a grid world")
    if connectivity not in (4, 8):
        raise InvalidParameter("connectivity must be 4 or 8")
    offsets = _OFFSETS_4 if connectivity == 4 else _OFFSETS_8
    s = world.cell_size
    diag = s * math.sqrt(2.0)
    free = world.codes != 0
    ids = np.full(free.shape, -1, dtype=np.int64)
    points: List[Point] = []
    zones: List[Zone] = []
    cells: List[Tuple[int, int]] = []
    for r in range(world.rows):
        for c in range(world.cols):
            if free[r, c]:
                ids[r, c] = len(points)
                points.append(world.cell_center(r, c))
                zones.append(world.zone_at(r, c))
                cells.append((r, c))
    edges: List[Tuple[int, int, float]] = []
    for u, (r, c) in enumerate(cells):
        for dr, dc in offsets:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < world.rows and 0 <= nc < world.cols) or not free[nr, nc]:
                continue
            if dr and dc:
                if not (free[r, nc] and free[nr, c]):
                    continue
                edges.append((u, int(ids[nr, nc]), diag))
            else:
                edges.append((u, int(ids[nr, nc]), s))
    return Roadmap(points, zones, edges, cells=cells,
                   metadata={"kind": "grid", "connectivity": connectivity})


def build_halton_roadmap(
    world: World,
    n: int,
    radius: float,
    *,
    offset: int = 0,
    extra_points: Sequence[Point] = (),
) -> Roadmap:
    """Halton PRM: ``n`` samples (bases 2 and 3) scaled to the world box, radius connection.

    ``extra_points`` (typically start and goal) are appended after the samples;
    their vertex ids are recorded in ``metadata["extra_ids"]``.
    """
    if n < 2:
        raise InvalidParameter("Halton roadmaps need n >= 2")
    if not radius > 0:
        raise InvalidParameter("connection radius must be positive")
    xmin, ymin, xmax, ymax = world.bounds
    sampler = qmc.Halton(d=2, scramble=False)
    if offset:
        sampler.fast_forward(int(offset))
    samples = qmc.scale(sampler.random(n), [xmin, ymin], [xmax, ymax])
    points: List[Point] = []
    zones: List[Zone] = []
    for x, y in samples:
        zone = world.classify_point((float(x), float(y)))
        if zone is not Zone.OBSTACLE:
            points.append((float(x), float(y)))
            zones.append(zone)
    if not points:
        raise EmptyRoadmap("no collision-free Halton samples")
    extra_ids = []
    for p in extra_points:
        zone = world.classify_point(p)
        if zone is Zone.OBSTACLE:
            raise InvalidQuery(f"query point {tuple(p)} lies in an obstacle")
        extra_ids.append(len(points))
        points.append((float(p[0]), float(p[1])))
        zones.append(zone)

    coords = np.asarray(points, dtype=float)
    pairs = cKDTree(coords).query_pairs(radius, output_type="ndarray")
    if len(pairs):
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        lengths = np.hypot(*(coords[pairs[:, 0]] - coords[pairs[:, 1]]).T)
        keep = lengths > 0
        if isinstance(world, PolygonWorld):
            keep &= world.segments_free(coords[pairs[:, 0]], coords[pairs[:, 1]])
        else:
            keep &= np.array([world.is_segment_free(points[i], points[j]) for i, j in pairs], dtype=bool)
        pairs, lengths = pairs[keep], lengths[keep]
    else:
        lengths = np.zeros(0)
    edges = [(int(i), int(j), float(d)) for (i, j), d in zip(pairs, lengths)]
    return Roadmap(points, zones, edges, metadata={
        "kind": "halton",
        "n": n,
        "radius": radius,
        "offset": offset,
        "connection_rule": "radius",
        "extra_ids": extra_ids,
    })


# ----------------------------------------------------------------------
# Refinement
# ----------------------------------------------------------------------
@dataclass
class RefinedRoadmap:
    points: List[Point]
    zones: List[Zone]
    adjacency: List[List[RefinedEdge]]
    border_ids: Tuple[int, ...]
    provenance: Dict[Tuple[int, int], int]
    original: Roadmap
    world: Optional[World] = None

    def __post_init__(self) -> None:
        self._edge_index: Optional[Dict[Tuple[int, int], RefinedEdge]] = None
        self._border_set = frozenset(self.border_ids)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_border(self) -> int:
        return len(self.border_ids)

    @property
    def start(self) -> Optional[int]:
        return self.original.start

    @property
    def goal(self) -> Optional[int]:
        return self.original.goal

    def is_border(self, v: int) -> bool:
        return v in self._border_set

    def label(self, v: int) -> str:
        if v < len(self.original):
            return self.original.label(v)
        return f"b{v}"

    def edge_between(self, u: int, v: int) -> Optional[RefinedEdge]:
        if self._edge_index is None:
            index: Dict[Tuple[int, int], RefinedEdge] = {}
            for a, items in enumerate(self.adjacency):
                for edge in items:
                    index.setdefault((a, edge.target), edge)
            self._edge_index = index
        return self._edge_index.get((u, v))

    def edge_count(self) -> int:
        return sum(len(items) for items in self.adjacency) // 2

    def to_dict(self) -> Dict[str, Any]:
        vertices = [
            {"x": x, "y": y, "zone": zone.value, "name": self.label(i)}
            for i, ((x, y), zone) in enumerate(zip(self.points, self.zones))
        ]
        edges = []
        for u, items in enumerate(self.adjacency):
            for edge in items:
                if u < edge.target:
                    edges.append({"u": u, "v": edge.target, "length": edge.length, "zone": edge.zone.value})
        return {"vertices": vertices, "edges": edges, "start": self.start, "goal": self.goal,
                "border_ids": list(self.border_ids)}


def _edge_pieces(g: Roadmap, world: Optional[World], edge_id: int, u: int, v: int
                 ) -> Tuple[List[float], List[Zone]]:
    """Crossing params of an edge and the zone of each piece between them."""
    if world is None:
        zu, zv = g.zones[u], g.zones[v]
        if zu is zv:
            return [], [zu]
        hint = g.crossing_hints.get(edge_id, 0.0)
        if 0.0 < hint < 1.0:
            return [hint if zu is Zone.SAFE else 1.0 - hint], [zu, zv]
        return [], [Zone.RISK]
    if g.cells is not None and isinstance(world, GridWorld):
        zu = world.zone_at(*g.cells[u])
        zv = world.zone_at(*g.cells[v])
        if zu is zv:
            return [], [zu]
        return [0.5], [zu, zv]
    pu, pv = g.points[u], g.points[v]
    crossings = world.segment_crossings(pu, pv)
    if not crossings:
        mid = ((pu[0] + pv[0]) / 2.0, (pu[1] + pv[1]) / 2.0)
        zone = world.classify_point(mid)
        if zone is Zone.OBSTACLE:
            raise CollisionError(f"edge {edge_id} passes through an obstacle")
        return [], [zone]
    zones = [Zone.SAFE if crossings[0].direction is CrossingDirection.SAFE_TO_RISK else Zone.RISK]
    for crossing in crossings:
        zones.append(Zone.RISK if crossing.direction is CrossingDirection.SAFE_TO_RISK else Zone.SAFE)
    return [c.param for c in crossings], zones


def refine(g: Roadmap, world: Optional[World] = None) -> RefinedRoadmap:
    """Subdivide every edge at its safe/risk crossings.

    With ``world=None`` (explicit graphs) a Safe-Risk edge places its border at
    ``crossing_hints[edge]`` measured from the Safe endpoint; the default 0
    puts it on the Safe endpoint itself, which then becomes a border vertex.
    A Safe vertex touching a Risk piece is promoted to Border in every case.
    """
    n = len(g)
    points = list(g.points)
    zones = list(g.zones)
    adjacency: List[List[RefinedEdge]] = [[] for _ in range(n)]
    provenance: Dict[Tuple[int, int], int] = {}
    border: List[int] = []
    promoted = set()

    for edge_id, (u, v, length) in enumerate(g.edges):
        params, piece_zones = _edge_pieces(g, world, edge_id, u, v)
        chain = [u]
        (ux, uy), (vx, vy) = g.points[u], g.points[v]
        for t in params:
            b = len(points)
            points.append((ux + (vx - ux) * t, uy + (vy - uy) * t))
            zones.append(Zone.BORDER)
            adjacency.append([])
            border.append(b)
            chain.append(b)
        chain.append(v)
        knots = [0.0] + list(params) + [1.0]
        for i in range(len(chain) - 1):
            a, c = chain[i], chain[i + 1]
            zone = piece_zones[i]
            sub_length = (knots[i + 1] - knots[i]) * length
            if zone is Zone.RISK:
                for end in (a, c):
                    if end < n and zones[end] is Zone.SAFE:
                        zones[end] = Zone.BORDER
                        promoted.add(end)
            adjacency[a].append(RefinedEdge(c, sub_length, zone))
            adjacency[c].append(RefinedEdge(a, sub_length, zone))
            provenance[(min(a, c), max(a, c))] = edge_id

    border_ids = tuple(sorted(promoted)) + tuple(border)
    return RefinedRoadmap(points, zones, adjacency, border_ids, provenance, g, world)


__all__ = [
    "Roadmap",
    "RefinedRoadmap",
    "RefinedEdge",
    "BorderEdge",
    "build_grid_roadmap",
    "build_halton_roadmap",
    "refine",
]
