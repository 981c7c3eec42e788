"""SVG rendering of a world and planner paths.

Line style identifies the planner, colour identifies the zone of each path
segment (green in Safe, blue in Risk). Output is byte-identical for identical
inputs: fixed hash salt, no date metadata, text kept as text.
"""
from __future__ import annotations

from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

from matplotlib import rc_context  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402
from matplotlib.lines import Line2D  # noqa: E402
from matplotlib.patches import PathPatch  # noqa: E402
from matplotlib.path import Path as MplPath  # noqa: E402
from shapely.geometry.polygon import orient  # noqa: E402

from .errors import OutputWriteError  # noqa: E402
from .results import PathResult  # noqa: E402
from .roadmap import RefinedRoadmap  # noqa: E402
from .world import GridWorld, PolygonWorld, World, Zone  # noqa: E402

ALGO_STYLES: Dict[str, str] = {
    "incremental": "-",
    "astar": "-",
    "precompute": "-",
    "dijkstra": "--",
    "minrisk": ":",
}
ALGO_WIDTHS: Dict[str, float] = {"incremental": 2.2, "astar": 1.6, "precompute": 1.2}
SEGMENT_COLORS = {Zone.SAFE: "#2e8b57", Zone.RISK: "#1f5fbf"}
ZONE_FILL = {Zone.OBSTACLE: "#4a4a4a", Zone.SAFE: "#ffffff", Zone.RISK: "#f4c2c2"}
_SVG_RC = {"svg.hashsalt": "risk_roadmap", "svg.fonttype": "none"}


def _polygon_patch(poly, **kwargs) -> PathPatch:
    poly = orient(poly, sign=1.0)
    rings = [MplPath(list(poly.exterior.coords), closed=True)]
    rings.extend(MplPath(list(r.coords), closed=True) for r in poly.interiors)
    return PathPatch(MplPath.make_compound_path(*rings), **kwargs)


def _draw_world(ax, world: Optional[World], g: Optional[RefinedRoadmap]) -> None:
    if isinstance(world, GridWorld):
        cmap = ListedColormap([ZONE_FILL[Zone.OBSTACLE], ZONE_FILL[Zone.SAFE], ZONE_FILL[Zone.RISK]])
        xmin, ymin, xmax, ymax = world.bounds
        ax.imshow(world.codes, cmap=cmap, vmin=0, vmax=2, origin="lower",
                  extent=(xmin, xmax, ymin, ymax), interpolation="nearest")
    elif isinstance(world, PolygonWorld):
        for poly in world.risk_polygons:
            ax.add_patch(_polygon_patch(poly, facecolor=ZONE_FILL[Zone.RISK], edgecolor="none"))
        for poly in world.obstacle_polygons:
            ax.add_patch(_polygon_patch(poly, facecolor=ZONE_FILL[Zone.OBSTACLE], edgecolor="none"))
    elif g is not None:
        for u, items in enumerate(g.adjacency):
            for edge in items:
                if u < edge.target:
                    (x0, y0), (x1, y1) = g.points[u], g.points[edge.target]
                    ax.plot([x0, x1], [y0, y1], color="#bbbbbb", linewidth=0.8, zorder=1)
        for zone in (Zone.SAFE, Zone.BORDER, Zone.RISK):
            pts = [p for p, z in zip(g.points, g.zones) if z is zone]
            if pts:
                ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=14, zorder=2,
                           color={Zone.SAFE: "#2e8b57", Zone.BORDER: "#e0a000",
                                  Zone.RISK: "#c03030"}[zone])
    if world is not None:
        xmin, ymin, xmax, ymax = world.bounds
        ax.set_xlim(xmin, xmax)
        ax.set_ylim(ymin, ymax)


def _segment_zone(result: PathResult, i: int, g: Optional[RefinedRoadmap]) -> Zone:
    if g is not None:
        edge = g.edge_between(result.path[i], result.path[i + 1])
        if edge is not None:
            return edge.zone
    if Zone.RISK in (result.zones[i], result.zones[i + 1]):
        return Zone.RISK
    return Zone.SAFE


def _draw_result(ax, result: PathResult, g: Optional[RefinedRoadmap]) -> None:
    style = ALGO_STYLES.get(result.algorithm, "-.")
    width = ALGO_WIDTHS.get(result.algorithm, 1.6)
    for i in range(len(result.points) - 1):
        (x0, y0), (x1, y1) = result.points[i], result.points[i + 1]
        ax.plot([x0, x1], [y0, y1], linestyle=style, linewidth=width,
                color=SEGMENT_COLORS[_segment_zone(result, i, g)], zorder=3,
                solid_capstyle="round")


def render_svg(
    world: Optional[World],
    results: Sequence[PathResult],
    output: Union[str, Path],
    *,
    roadmap: Optional[RefinedRoadmap] = None,
    title: Optional[str] = None,
) -> Path:
    """Write the world and every reachable path to ``output``; returns the path written."""
    output = Path(output)
    with rc_context(_SVG_RC):
        fig = Figure(figsize=(6.0, 6.0))
        ax = fig.add_subplot(1, 1, 1)
        ax.set_aspect("equal")
        _draw_world(ax, world, roadmap)
        handles = []
        drawn = set()
        for result in results:
            if not result.reachable:
                continue
            _draw_result(ax, result, roadmap)
            if result.algorithm not in drawn:
                drawn.add(result.algorithm)
                handles.append(Line2D([], [], color="black", linestyle=ALGO_STYLES.get(result.algorithm, "-."),
                                      label=f"{result.algorithm} (cost {result.cost:.3g})"))
        reachable = [r for r in results if r.reachable]
        if reachable:
            first = reachable[0]
            ax.plot(*first.points[0], marker="o", color="black", markersize=6, zorder=4)
            ax.plot(*first.points[-1], marker="*", color="black", markersize=9, zorder=4)
            handles.append(Line2D([], [], color=SEGMENT_COLORS[Zone.SAFE], label="safe segment"))
            handles.append(Line2D([], [], color=SEGMENT_COLORS[Zone.RISK], label="risk segment"))
        if handles:
            ax.legend(handles=handles, loc="upper right", fontsize=7, framealpha=0.9)
        if title:
            ax.set_title(title)
        try:
            output.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(output, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OutputWriteError(str(output), exc.strerror or str(exc)) from exc
    return output


__all__ = ["ALGO_STYLES", "SEGMENT_COLORS", "render_svg"]
