"""Zone geometry: which part of the plane is obstacle, safe or risk.

Two representations share one interface:

- ``GridWorld``: rows x cols cells, one ``Zone`` per cell, square cells of
  ``cell_size`` length units, origin at ``(x0, y0)``. Row ``r`` spans
  ``y0 + r*s .. y0 + (r+1)*s`` and column ``c`` spans ``x0 + c*s .. x0 + (c+1)*s``.
- ``PolygonWorld``: obstacle and risk polygons inside a bounding box, backed
  by shapely. Risk is an open set and free space is closed, so boundary points
  classify as Safe.

Worlds are immutable after construction and safe to query from several
searches at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import shapely
from shapely.geometry import LineString, Polygon
from shapely.geometry import Point as ShapelyPoint
from shapely.geometry.base import BaseGeometry

from .errors import CollisionError, InvalidParameter, OutOfBounds, ScenarioParseError

Point = Tuple[float, float]

# crossings closer than this (segment parameter units) are merged
CROSSING_MERGE_EPS = 1e-9
_KNOT_EPS = 1e-12


class Zone(str, Enum):
    OBSTACLE = "obstacle"
    SAFE = "safe"
    RISK = "risk"
    BORDER = "border"


class CrossingDirection(str, Enum):
    SAFE_TO_RISK = "safe_to_risk"
    RISK_TO_SAFE = "risk_to_safe"

    def flipped(self) -> "CrossingDirection":
        if self is CrossingDirection.SAFE_TO_RISK:
            return CrossingDirection.RISK_TO_SAFE
        return CrossingDirection.SAFE_TO_RISK


@dataclass(frozen=True)
class Crossing:
    param: float
    direction: CrossingDirection


GRID_CHARS = {"#": Zone.OBSTACLE, ".": Zone.SAFE, "~": Zone.RISK}
_ZONE_CHARS = {zone: ch for ch, zone in GRID_CHARS.items()}
_ZONE_CODES = {Zone.OBSTACLE: 0, Zone.SAFE: 1, Zone.RISK: 2}
_CODE_ZONES = {code: zone for zone, code in _ZONE_CODES.items()}


def _crossings_from_zones(knots: Sequence[float], zones: Sequence[Zone]) -> List[Crossing]:
    out: List[Crossing] = []
    for i in range(1, len(zones)):
        before, after = zones[i - 1], zones[i]
        if before is after:
            continue
        if before is Zone.SAFE and after is Zone.RISK:
            out.append(Crossing(knots[i], CrossingDirection.SAFE_TO_RISK))
        elif before is Zone.RISK and after is Zone.SAFE:
            out.append(Crossing(knots[i], CrossingDirection.RISK_TO_SAFE))
    return out


class World:
    """Common interface of the two world representations."""

    kind = "abstract"

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        raise NotImplementedError

    def classify_point(self, p: Point) -> Zone:
        raise NotImplementedError

    def segment_crossings(self, a: Point, b: Point) -> List[Crossing]:
        raise NotImplementedError

    def is_segment_free(self, a: Point, b: Point) -> bool:
        try:
            self.segment_crossings(a, b)
        except (CollisionError, OutOfBounds):
            return False
        return True

    def _check_inside(self, p: Point) -> Tuple[float, float]:
        x, y = float(p[0]), float(p[1])
        xmin, ymin, xmax, ymax = self.bounds
        if not (xmin <= x <= xmax and ymin <= y <= ymax):
            raise OutOfBounds(f"point ({x:g}, {y:g}) outside world bounds {self.bounds}")
        return x, y


class GridWorld(World):
    kind = "grid"

    def __init__(self, labels: Sequence[Sequence[Zone]], cell_size: float = 1.0,
                 origin: Point = (0.0, 0.0)) -> None:
        try:
            rows = [[Zone(z) for z in row] for row in labels]
        except ValueError as exc:
            raise InvalidParameter(f"bad grid cell label: {exc}") from exc
        if not rows or not rows[0]:
            raise InvalidParameter("grid dimensions must be at least 1x1")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise InvalidParameter("grid rows must all have the same length")
        if not cell_size > 0:
            raise InvalidParameter("cell_size must be positive")
        for row in rows:
            for zone in row:
                if zone is Zone.BORDER:
                    raise InvalidParameter(f"grid cells must be obstacle/safe/risk, got {zone!r}")
        self._rows = rows
        self.rows = len(rows)
        self.cols = width
        self.cell_size = float(cell_size)
        self.origin = (float(origin[0]), float(origin[1]))
        self.codes = np.array([[_ZONE_CODES[z] for z in row] for row in rows], dtype=np.int8)
        self.codes.setflags(write=False)

    # ------------------------------------------------------------------
    # Construction helpers
    # ------------------------------------------------------------------
    @classmethod
    def from_codes(cls, codes: np.ndarray, cell_size: float = 1.0,
                   origin: Point = (0.0, 0.0)) -> "GridWorld":
        labels = [[_CODE_ZONES[int(c)] for c in row] for row in np.asarray(codes)]
        return cls(labels, cell_size, origin)

    @classmethod
    def from_text(cls, text: str, *, source: Optional[str] = None) -> "GridWorld":
        """Parse the ASCII grid format (``grid <rows> <cols> <cell_size>`` header)."""
        lines = text.splitlines()
        while lines and not lines[-1].strip():
            lines.pop()
        if not lines:
            raise ScenarioParseError("empty grid file", line=1, column=1, source=source)
        header = lines[0].split()
        if len(header) != 4 or header[0] != "grid":
            raise ScenarioParseError("expected header 'grid <rows> <cols> <cell_size>'",
                                     line=1, column=1, source=source)
        try:
            n_rows, n_cols = int(header[1]), int(header[2])
            cell_size = float(header[3])
        except ValueError as exc:
            raise ScenarioParseError(f"bad grid header: {exc}", line=1, column=1, source=source) from exc
        if n_rows < 1 or n_cols < 1 or not cell_size > 0:
            raise ScenarioParseError("grid dimensions must be >= 1 and cell_size > 0",
                                     line=1, column=1, source=source)
        body = lines[1:]
        if len(body) != n_rows:
            raise ScenarioParseError(f"expected {n_rows} grid rows, found {len(body)}",
                                     line=len(lines) + 1, column=1, source=source)
        labels: List[List[Zone]] = []
        for r, raw in enumerate(body):
            row = raw.rstrip("\r\n")
            if len(row) != n_cols:
                raise ScenarioParseError(f"expected {n_cols} cells, found {len(row)}",
                                         line=r + 2, column=min(len(row), n_cols) + 1, source=source)
            parsed = []
            for c, ch in enumerate(row):
                zone = GRID_CHARS.get(ch)
                if zone is None:
                    raise ScenarioParseError(f"unknown cell character {ch!r}",
                                             line=r + 2, column=c + 1, source=source)
                parsed.append(zone)
            labels.append(parsed)
        return cls(labels, cell_size)

    def to_text(self) -> str:
        lines = [f"grid {self.rows} {self.cols} {self.cell_size!r}"]
        lines.extend("".join(_ZONE_CHARS[z] for z in row) for row in self._rows)
        return "\n".join(lines) + "\n"

    # ------------------------------------------------------------------
    # Cell access
    # ------------------------------------------------------------------
    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        x0, y0 = self.origin
        return (x0, y0, x0 + self.cols * self.cell_size, y0 + self.rows * self.cell_size)

    def zone_at(self, row: int, col: int) -> Zone:
        return self._rows[row][col]

    def cell_center(self, row: int, col: int) -> Point:
        x0, y0 = self.origin
        return (x0 + (col + 0.5) * self.cell_size, y0 + (row + 0.5) * self.cell_size)

    def cell_of(self, p: Point) -> Tuple[int, int]:
        x, y = self._check_inside(p)
        col = min(int(math.floor((x - self.origin[0]) / self.cell_size)), self.cols - 1)
        row = min(int(math.floor((y - self.origin[1]) / self.cell_size)), self.rows - 1)
        return row, col

    def _touching_cells(self, u: float, v: float) -> List[Tuple[int, int]]:
        """Cells whose closure contains the point given in cell units."""
        fu, fv = math.floor(u), math.floor(v)
        cols = [fu - 1, fu] if u == fu else [fu]
        rows = [fv - 1, fv] if v == fv else [fv]
        return [(r, c) for r in rows if 0 <= r < self.rows for c in cols if 0 <= c < self.cols]

    def _label_at(self, u: float, v: float) -> Zone:
        labels = {self._rows[r][c] for r, c in self._touching_cells(u, v)}
        if labels == {Zone.RISK}:
            return Zone.RISK
        if labels == {Zone.OBSTACLE}:
            return Zone.OBSTACLE
        return Zone.SAFE

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------
    def classify_point(self, p: Point) -> Zone:
        x, y = self._check_inside(p)
        return self._label_at((x - self.origin[0]) / self.cell_size, (y - self.origin[1]) / self.cell_size)

    def segment_crossings(self, a: Point, b: Point) -> List[Crossing]:
        ax, ay = self._check_inside(a)
        bx, by = self._check_inside(b)
        s = self.cell_size
        u0, v0 = (ax - self.origin[0]) / s, (ay - self.origin[1]) / s
        u1, v1 = (bx - self.origin[0]) / s, (by - self.origin[1]) / s
        params = sorted(_grid_line_params(u0, u1) + _grid_line_params(v0, v1))
        knots = [0.0]
        for t in params:
            if t - knots[-1] > _KNOT_EPS and 1.0 - t > _KNOT_EPS:
                knots.append(t)
        knots.append(1.0)

        def at(t: float) -> Tuple[float, float]:
            return u0 + (u1 - u0) * t, v0 + (v1 - v0) * t

        samples = list(knots) + [(knots[i] + knots[i + 1]) / 2.0 for i in range(len(knots) - 1)]
        for t in samples:
            for r, c in self._touching_cells(*at(t)):
                if self._rows[r][c] is Zone.OBSTACLE:
                    raise CollisionError(
                        f"segment ({ax:g}, {ay:g})-({bx:g}, {by:g}) touches obstacle cell ({r}, {c})"
                    )
        zones = [self._label_at(*at((knots[i] + knots[i + 1]) / 2.0)) for i in range(len(knots) - 1)]
        return _crossings_from_zones(knots, zones)


def _grid_line_params(start: float, end: float) -> List[float]:
    """Parameters in (0, 1) where ``start + (end - start) t`` hits an integer."""
    if start == end:
        return []
    lo, hi = min(start, end), max(start, end)
    out = []
    for k in range(int(math.floor(lo)) + 1, int(math.ceil(hi))):
        t = (k - start) / (end - start)
        if 0.0 < t < 1.0:
            out.append(t)
    return out


PolygonSpec = Union[Sequence[Sequence[float]], Mapping[str, Any]]


def _as_polygon(coords: PolygonSpec) -> Polygon:
    """Polygon from a ring of coordinates or a ``{"shell": ring, "holes": [ring, ...]}`` mapping."""
    if isinstance(coords, Mapping):
        shell = coords.get("shell") or ()
        holes = coords.get("holes") or ()
        poly = Polygon([(float(x), float(y)) for x, y in shell],
                       [[(float(x), float(y)) for x, y in ring] for ring in holes])
    else:
        poly = Polygon([(float(x), float(y)) for x, y in coords])
    if not poly.is_valid or poly.area <= 0:
        raise InvalidParameter("invalid polygon (self-intersecting or empty)")
    return poly


def _iter_hit_points(geom: BaseGeometry) -> Iterable[Tuple[float, float]]:
    if geom.is_empty:
        return
    if geom.geom_type == "Point":
        yield (geom.x, geom.y)
    elif geom.geom_type in ("LineString", "LinearRing"):
        coords = list(geom.coords)
        yield coords[0]
        yield coords[-1]
    else:
        for part in getattr(geom, "geoms", []):
            yield from _iter_hit_points(part)


class PolygonWorld(World):
    kind = "polygon"

    def __init__(
        self,
        obstacles: Sequence[PolygonSpec] = (),
        risk: Sequence[PolygonSpec] = (),
        bounds: Tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0),
    ) -> None:
        xmin, ymin, xmax, ymax = (float(v) for v in bounds)
        if not (xmax > xmin and ymax > ymin):
            raise InvalidParameter("world bounds must have positive extent")
        self._bounds = (xmin, ymin, xmax, ymax)
        self.obstacle_polygons = [_as_polygon(p) for p in obstacles]
        self.risk_polygons = [_as_polygon(p) for p in risk]
        self._obstacles = shapely.union_all(self.obstacle_polygons) if self.obstacle_polygons else None
        self._risk = shapely.union_all(self.risk_polygons) if self.risk_polygons else None
        if self._obstacles is not None and self._risk is not None:
            if self._obstacles.intersection(self._risk).area > 0:
                raise InvalidParameter("risk polygons must not overlap obstacles")
        self._risk_boundary = self._risk.boundary if self._risk is not None else None
        for geom in (self._obstacles, self._risk, self._risk_boundary):
            if geom is not None:
                shapely.prepare(geom)

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return self._bounds

    @property
    def obstacle_geometry(self) -> Optional[BaseGeometry]:
        return self._obstacles

    @property
    def risk_geometry(self) -> Optional[BaseGeometry]:
        return self._risk

    def classify_point(self, p: Point) -> Zone:
        x, y = self._check_inside(p)
        if self._obstacles is not None and shapely.contains_xy(self._obstacles, x, y):
            return Zone.OBSTACLE
        if self._risk is not None and shapely.contains_xy(self._risk, x, y):
            return Zone.RISK
        return Zone.SAFE

    def segments_free(self, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
        """Vectorised obstacle test for many segments (True where collision free)."""
        if self._obstacles is None or len(starts) == 0:
            return np.ones(len(starts), dtype=bool)
        coords = np.stack([np.asarray(starts, dtype=float), np.asarray(ends, dtype=float)], axis=1)
        lines = shapely.linestrings(coords)
        return ~shapely.intersects(self._obstacles, lines)

    def segment_crossings(self, a: Point, b: Point) -> List[Crossing]:
        ax, ay = self._check_inside(a)
        bx, by = self._check_inside(b)
        if (ax, ay) == (bx, by):
            if self.classify_point((ax, ay)) is Zone.OBSTACLE:
                raise CollisionError(f"point ({ax:g}, {ay:g}) lies in an obstacle")
            return []
        line = LineString([(ax, ay), (bx, by)])
        if self._obstacles is not None and self._obstacles.intersects(line):
            raise CollisionError(f"segment ({ax:g}, {ay:g})-({bx:g}, {by:g}) touches an obstacle")
        if self._risk is None or not self._risk_boundary.intersects(line):
            return []
        hits = line.intersection(self._risk_boundary)
        raw = sorted(line.project(ShapelyPoint(pt), normalized=True) for pt in _iter_hit_points(hits))
        knots = [0.0]
        for t in raw:
            if t - knots[-1] > CROSSING_MERGE_EPS and 1.0 - t > CROSSING_MERGE_EPS:
                knots.append(t)
        knots.append(1.0)
        mids = np.array([(knots[i] + knots[i + 1]) / 2.0 for i in range(len(knots) - 1)])
        xs = ax + (bx - ax) * mids
        ys = ay + (by - ay) * mids
        inside = shapely.contains_xy(self._risk, xs, ys)
        zones = [Zone.RISK if flag else Zone.SAFE for flag in inside]
        return _crossings_from_zones(knots, zones)


# ----------------------------------------------------------------------
# Module-level operations
# ----------------------------------------------------------------------
def classify_point(world: World, p: Point) -> Zone:
    return world.classify_point(p)


def segment_crossings(world: World, a: Point, b: Point) -> List[Crossing]:
    return world.segment_crossings(a, b)


def reverse_crossings(crossings: Sequence[Crossing]) -> List[Crossing]:
    """Crossings of the reversed segment."""
    return [Crossing(1.0 - c.param, c.direction.flipped()) for c in reversed(crossings)]


def risk_offset_world(
    obstacles: Sequence[PolygonSpec],
    d: float,
    *,
    cell_size: float,
    bounds: Tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0),
) -> GridWorld:
    """Coastal-navigation world: cells farther than ``d`` from every obstacle are Risk.

    A cell whose center lies in an obstacle is Obstacle, a free cell within
    distance ``d`` of an obstacle is Safe. With no obstacles every cell is Risk.
    """
    if not d > 0:
        raise InvalidParameter("risk offset d must be positive")
    if not cell_size > 0:
        raise InvalidParameter("cell_size must be positive")
    xmin, ymin, xmax, ymax = (float(v) for v in bounds)
    cols = max(1, int(round((xmax - xmin) / cell_size)))
    rows = max(1, int(round((ymax - ymin) / cell_size)))
    cx = xmin + (np.arange(cols) + 0.5) * cell_size
    cy = ymin + (np.arange(rows) + 0.5) * cell_size
    gx, gy = np.meshgrid(cx, cy)
    polygons = [_as_polygon(p) for p in obstacles]
    codes = np.full((rows, cols), _ZONE_CODES[Zone.RISK], dtype=np.int8)
    if polygons:
        land = shapely.union_all(polygons)
        shapely.prepare(land)
        points = shapely.points(gx.ravel(), gy.ravel())
        inside = shapely.intersects(land, points).reshape(rows, cols)
        dist = shapely.distance(land, points).reshape(rows, cols)
        codes[dist <= d] = _ZONE_CODES[Zone.SAFE]
        codes[inside] = _ZONE_CODES[Zone.OBSTACLE]
    return GridWorld.from_codes(codes, cell_size, origin=(xmin, ymin))


__all__ = [
    "Zone",
    "CrossingDirection",
    "Crossing",
    "World",
    "GridWorld",
    "PolygonWorld",
    "classify_point",
    "segment_crossings",
    "reverse_crossings",
    "risk_offset_world",
    "GRID_CHARS",
    "CROSSING_MERGE_EPS",
]
