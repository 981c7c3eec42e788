"""Scenario files: one world source, one roadmap recipe, start, goal, options.

A scenario is plain JSON::

    {
      "name": "coastal_small",
      "seed": 7,
      "world": {"polygons": {"bounds": [0, 0, 1, 1], "obstacles": [...], "risk_offset": 0.3,
                             "cell_size": 0.02}},
      "roadmap": {"kind": "grid", "connectivity": 8},
      "start": {"point": [0.08, 0.5]},
      "goal": {"point": [0.92, 0.5]},
      "options": {"alpha": 1.0}
    }

World sources: ``grid`` (path to an ASCII grid file, relative to the
scenario), ``grid_text`` (inline grid), ``polygons`` and ``graph`` (explicit
vertices and edges). Endpoints: a vertex id or name, ``{"vertex": ...}``,
``{"cell": [row, col]}`` or ``{"point": [x, y]}``.

The generators at the bottom build the synthetic worlds used by the tests,
the benchmark and ``scripts/generate_scenarios.py``.
"""
from __future__ import annotations

import copy
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import shapely

from .config import PlannerOptions, resolve_options
from .errors import InvalidParameter, InvalidQuery, ScenarioParseError
from .roadmap import RefinedRoadmap, Roadmap, build_grid_roadmap, build_halton_roadmap, refine
from .world import GridWorld, PolygonWorld, World, Zone, risk_offset_world

WORLD_KINDS = ("grid", "grid_text", "polygons", "graph")
ROADMAP_KINDS = ("grid", "halton", "explicit")


@dataclass
class Scenario:
    name: str
    world: Dict[str, Any]
    roadmap: Dict[str, Any]
    start: Any
    goal: Any
    options: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    source: Optional[str] = field(default=None, compare=False)
    base_dir: Optional[Path] = field(default=None, compare=False)

    @property
    def world_kind(self) -> str:
        return next(iter(self.world))

    # ------------------------------------------------------------------
    # Parsing
    # ------------------------------------------------------------------
    @classmethod
    def from_dict(cls, data: Any, *, source: Optional[str] = None,
                  base_dir: Optional[Path] = None) -> "Scenario":
        if not isinstance(data, Mapping):
            raise ScenarioParseError("scenario must be a JSON object", source=source)
        world = data.get("world")
        if not isinstance(world, Mapping):
            raise ScenarioParseError("scenario needs a 'world' object", source=source)
        kinds = [k for k in WORLD_KINDS if k in world]
        if len(kinds) != 1 or len(world) != 1:
            raise ScenarioParseError(
                f"'world' must have exactly one of {', '.join(WORLD_KINDS)}", source=source
            )
        kind = kinds[0]
        recipe = dict(data.get("roadmap") or {})
        if "kind" not in recipe:
            recipe["kind"] = "explicit" if kind == "graph" else "grid"
        if recipe["kind"] not in ROADMAP_KINDS:
            raise ScenarioParseError(f"unknown roadmap kind '{recipe['kind']}'", source=source)
        if (recipe["kind"] == "explicit") != (kind == "graph"):
            raise ScenarioParseError("explicit roadmaps go with 'graph' worlds and only with them",
                                     source=source)
        if recipe["kind"] == "grid":
            recipe.setdefault("connectivity", 8)
        if recipe["kind"] == "halton":
            if "n" not in recipe or "radius" not in recipe:
                raise ScenarioParseError("halton roadmaps need 'n' and 'radius'", source=source)
            recipe.setdefault("offset", 0)
        for key in ("start", "goal"):
            if data.get(key) is None:
                raise ScenarioParseError(f"scenario needs '{key}'", source=source)
        options = data.get("options") or {}
        if not isinstance(options, Mapping):
            raise ScenarioParseError("'options' must be an object", source=source)
        seed = data.get("seed")
        return cls(
            name=str(data.get("name") or (Path(source).stem if source else "scenario")),
            world=copy.deepcopy(dict(world)),
            roadmap=recipe,
            start=copy.deepcopy(data["start"]),
            goal=copy.deepcopy(data["goal"]),
            options=dict(options),
            seed=None if seed is None else int(seed),
            source=source,
            base_dir=base_dir,
        )

    @classmethod
    def from_json(cls, text: str, *, source: Optional[str] = None,
                  base_dir: Optional[Path] = None) -> "Scenario":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioParseError(exc.msg, line=exc.lineno, column=exc.colno, source=source) from exc
        return cls.from_dict(data, source=source, base_dir=base_dir)

    @classmethod
    def load(cls, path: Path) -> "Scenario":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioParseError(f"cannot read scenario: {exc.strerror}", source=str(path)) from exc
        return cls.from_json(text, source=str(path), base_dir=path.parent)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name}
        if self.seed is not None:
            data["seed"] = self.seed
        data.update({
            "world": copy.deepcopy(self.world),
            "roadmap": dict(self.roadmap),
            "start": copy.deepcopy(self.start),
            "goal": copy.deepcopy(self.goal),
        })
        if self.options:
            data["options"] = dict(self.options)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------
    def build_world(self) -> Optional[World]:
        kind = self.world_kind
        spec = self.world[kind]
        if kind == "grid":
            path = Path(spec)
            if not path.is_absolute() and self.base_dir is not None:
                path = self.base_dir / path
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise ScenarioParseError(f"cannot read grid: {exc.strerror}", source=str(path)) from exc
            return GridWorld.from_text(text, source=str(path))
        if kind == "grid_text":
            return GridWorld.from_text(str(spec), source=self.source)
        if kind == "polygons":
            bounds = tuple(spec.get("bounds", (0.0, 0.0, 1.0, 1.0)))
            obstacles = spec.get("obstacles", [])
            if "risk_offset" in spec:
                if "cell_size" not in spec:
                    raise ScenarioParseError("risk_offset worlds need 'cell_size'", source=self.source)
                return risk_offset_world(obstacles, float(spec["risk_offset"]),
                                         cell_size=float(spec["cell_size"]), bounds=bounds)
            return PolygonWorld(obstacles, spec.get("risk", []), bounds)
        return None

    def build_roadmap(self, world: Optional[World]) -> Roadmap:
        recipe = self.roadmap
        if recipe["kind"] == "explicit":
            return Roadmap.from_dict(self.world["graph"], source=self.source)
        if world is None:
            raise InvalidParameter("geometric roadmaps need a world")
        if recipe["kind"] == "grid":
            return build_grid_roadmap(world, int(recipe["connectivity"]))
        extra = [tuple(ref["point"]) for ref in (self.start, self.goal)
                 if isinstance(ref, Mapping) and "point" in ref]
        return build_halton_roadmap(world, int(recipe["n"]), float(recipe["radius"]),
                                    offset=int(recipe.get("offset", 0)), extra_points=extra)

    def resolve_endpoint(self, ref: Any, g: Roadmap, world: Optional[World]) -> int:
        if isinstance(ref, bool):
            raise InvalidQuery(f"bad endpoint {ref!r}")
        if isinstance(ref, (int, str)):
            return g.vertex_id(ref)
        if not isinstance(ref, Mapping):
            raise InvalidQuery(f"bad endpoint {ref!r}")
        if "vertex" in ref:
            return g.vertex_id(ref["vertex"])
        if "cell" in ref:
            if g.cells is None:
                raise InvalidQuery("cell endpoints need a grid roadmap")
            cell = tuple(int(v) for v in ref["cell"])
            try:
                return g.cells.index(cell)
            except ValueError:
                raise InvalidQuery(f"cell {list(cell)} is not a free grid cell") from None
        if "point" in ref:
            p = (float(ref["point"][0]), float(ref["point"][1]))
            if world is not None and world.classify_point(p) is Zone.OBSTACLE:
                raise InvalidQuery(f"point {list(p)} lies in an obstacle")
            extra = g.metadata.get("extra_ids") or []
            for v in extra:
                if g.points[v] == p:
                    return v
            if g.cells is not None and isinstance(world, GridWorld):
                return self.resolve_endpoint({"cell": list(world.cell_of(p))}, g, world)
            return int(np.argmin([math.dist(p, q) for q in g.points]))
        raise InvalidQuery(f"bad endpoint {ref!r}")

    def prepare(self, options: Optional[PlannerOptions] = None,
                config: Optional[Mapping[str, Any]] = None) -> "PreparedScenario":
        """Build world, roadmap and refinement; this is outside every planner timing."""
        started = time.perf_counter()
        world = self.build_world()
        roadmap = self.build_roadmap(world)
        xs = self.resolve_endpoint(self.start, roadmap, world)
        xg = self.resolve_endpoint(self.goal, roadmap, world)
        roadmap.start, roadmap.goal = xs, xg
        refined = refine(roadmap, world)
        options = options or resolve_options(config, self.options)
        return PreparedScenario(self, world, roadmap, refined, xs, xg, options,
                                time.perf_counter() - started)


@dataclass
class PreparedScenario:
    scenario: Scenario
    world: Optional[World]
    roadmap: Roadmap
    refined: RefinedRoadmap
    xs: int
    xg: int
    options: PlannerOptions
    build_seconds: float


def load_scenario(path: Path) -> Scenario:
    return Scenario.load(path)


# ----------------------------------------------------------------------
# Generators
# ----------------------------------------------------------------------
def detour_graph(goal: str = "z") -> Dict[str, Any]:
    """The five-vertex example where the best route to ``y`` is not on the best route to ``z``."""
    return {
        "vertices": [
            {"name": "x_s", "x": -2.0, "y": 0.0, "zone": "safe"},
            {"name": "x1", "x": -1.5, "y": 0.0, "zone": "safe"},
            {"name": "x2", "x": 1.0, "y": 0.0, "zone": "safe"},
            {"name": "y", "x": 0.0, "y": 0.0, "zone": "risk"},
            {"name": "z", "x": 0.0, "y": 0.5, "zone": "risk"},
        ],
        "edges": [
            {"u": "x_s", "v": "x1", "length": 0.5},
            {"u": "x_s", "v": "x2", "length": 3.0},
            {"u": "x1", "v": "y", "length": 1.5},
            {"u": "x2", "v": "y", "length": 1.0},
            {"u": "y", "v": "z", "length": 0.5},
        ],
        "start": "x_s",
        "goal": goal,
    }


def detour_scenario(goal: str = "z") -> Scenario:
    graph = detour_graph(goal)
    return Scenario.from_dict({
        "name": "detour",
        "world": {"graph": graph},
        "roadmap": {"kind": "explicit"},
        "start": {"vertex": "x_s"},
        "goal": {"vertex": goal},
        "options": {"alpha": 1.0},
    })


def random_small_roadmap(
    rng: np.random.Generator,
    n_vertices: int,
    *,
    edge_prob: float = 0.35,
    risk_prob: float = 0.5,
    length_range: Tuple[float, float] = (0.1, 2.0),
    safe_start: bool = True,
) -> Roadmap:
    """Random explicit graph with random zones and random positive edge lengths.

    Vertex 0 is the start and the last vertex the goal; a random spanning path
    keeps most instances connected.
    """
    if n_vertices < 2:
        raise InvalidParameter("need at least two vertices")
    points = [tuple(float(v) for v in rng.uniform(0.0, 1.0, size=2)) for _ in range(n_vertices)]
    zones = [Zone.RISK if rng.random() < risk_prob else Zone.SAFE for _ in range(n_vertices)]
    if safe_start:
        zones[0] = Zone.SAFE
    pairs = set()
    order = rng.permutation(n_vertices)
    for a, b in zip(order, order[1:]):
        if rng.random() < 0.9:
            pairs.add((int(min(a, b)), int(max(a, b))))
    for u in range(n_vertices):
        for v in range(u + 1, n_vertices):
            if rng.random() < edge_prob:
                pairs.add((u, v))
    lo, hi = length_range
    edges = [(u, v, float(rng.uniform(lo, hi))) for u, v in sorted(pairs)]
    return Roadmap(points, zones, edges, start=0, goal=n_vertices - 1,
                   metadata={"kind": "explicit"})


def random_grid_world(
    rng: np.random.Generator,
    rows: int,
    cols: int,
    *,
    risk_prob: float = 0.3,
    obstacle_prob: float = 0.1,
    cell_size: float = 1.0,
) -> GridWorld:
    draws = rng.random((rows, cols))
    codes = np.ones((rows, cols), dtype=np.int8)
    codes[draws < risk_prob + obstacle_prob] = 2
    codes[draws < obstacle_prob] = 0
    return GridWorld.from_codes(codes, cell_size)


def _ring(center: Tuple[float, float], radius: float, quad_segs: int = 32) -> List[List[float]]:
    circle = shapely.Point(center).buffer(radius, quad_segs=quad_segs)
    return [[round(x, 6), round(y, 6)] for x, y in circle.exterior.coords]


def coastal_scenario(
    size: int = 201,
    *,
    lake_radius: float = 0.45,
    offset: float = 0.1,
    islands: int = 0,
    seed: int = 0,
    alpha: float = 1.0,
) -> Scenario:
    """A lake in the unit square: water farther than ``offset`` from land is Risk.

    Start and goal sit on opposite shores of the same grid row, so the
    straight line runs through the middle of the risk region. With the
    default offset the risk disk has radius ``lake_radius - offset``.
    """
    rng = np.random.default_rng(seed)
    square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]
    obstacles: List[Any] = [{"shell": square, "holes": [_ring((0.5, 0.5), lake_radius)]}]
    placed = 0
    while placed < islands:
        cx, cy = rng.uniform(0.2, 0.8, size=2)
        r = float(rng.uniform(0.02, 0.05))
        if abs(cy - 0.5) < r + 0.03:
            continue
        obstacles.append(_ring((float(cx), float(cy)), r, quad_segs=8))
        placed += 1
    return Scenario.from_dict({
        "name": f"coastal_{size}",
        "seed": seed,
        "world": {"polygons": {
            "bounds": [0.0, 0.0, 1.0, 1.0],
            "obstacles": obstacles,
            "risk_offset": offset,
            "cell_size": 1.0 / size,
        }},
        "roadmap": {"kind": "grid", "connectivity": 8},
        "start": {"point": [0.08, 0.5]},
        "goal": {"point": [0.92, 0.5]},
        "options": {"alpha": alpha},
    })


def narrow_passage_scenario(n: int = 2000, radius: float = 0.06, *, offset: int = 0) -> Scenario:
    """Halton roadmap over two risk blocks separated by a thin safe corridor."""
    return Scenario.from_dict({
        "name": f"narrow_passage_{n}",
        "seed": offset,
        "world": {"polygons": {
            "bounds": [0.0, 0.0, 1.0, 1.0],
            "obstacles": [],
            "risk": [
                [[0.2, 0.0], [0.8, 0.0], [0.8, 0.45], [0.2, 0.45]],
                [[0.2, 0.5], [0.8, 0.5], [0.8, 1.0], [0.2, 1.0]],
            ],
        }},
        "roadmap": {"kind": "halton", "n": n, "radius": radius, "offset": offset},
        "start": {"point": [0.05, 0.9]},
        "goal": {"point": [0.95, 0.9]},
    })


__all__ = [
    "WORLD_KINDS",
    "ROADMAP_KINDS",
    "Scenario",
    "PreparedScenario",
    "load_scenario",
    "detour_graph",
    "detour_scenario",
    "random_small_roadmap",
    "random_grid_world",
    "coastal_scenario",
    "narrow_passage_scenario",
]
