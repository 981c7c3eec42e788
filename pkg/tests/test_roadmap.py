from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path

import networkx as nx
import numpy as np

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from risk_roadmap.errors import EmptyRoadmap, InvalidParameter, InvalidQuery, ScenarioParseError
from risk_roadmap.oracle import to_networkx
from risk_roadmap.roadmap import Roadmap, build_grid_roadmap, build_halton_roadmap, refine
from risk_roadmap.scenario import detour_graph, random_grid_world
from risk_roadmap.world import GridWorld, PolygonWorld, Zone

STRIP = GridWorld.from_text((PROJECT_ROOT / "data" / "scenarios" / "strip.grid").read_text(encoding="utf-8"))


def _open_grid(rows: int, cols: int, cell_size: float = 1.0) -> GridWorld:
    return GridWorld([[Zone.SAFE] * cols for _ in range(rows)], cell_size)


def _assert_zone_pure(test: unittest.TestCase, refined) -> None:
    for u, items in enumerate(refined.adjacency):
        for edge in items:
            ends = {refined.zones[u], refined.zones[edge.target]}
            if edge.zone is Zone.SAFE:
                test.assertNotIn(Zone.RISK, ends)
            else:
                test.assertIs(edge.zone, Zone.RISK)
                test.assertNotIn(Zone.SAFE, ends)


class GridRoadmapTest(unittest.TestCase):
    def test_edge_counts(self):
        world = _open_grid(3, 3)
        self.assertEqual(build_grid_roadmap(world, 4).edge_count, 12)
        self.assertEqual(build_grid_roadmap(world, 8).edge_count, 20)

    def test_lengths_follow_cell_size(self):
        g = build_grid_roadmap(_open_grid(2, 2, cell_size=0.5), 8)
        lengths = sorted(length for _u, _v, length in g.edges)
        self.assertEqual(lengths[:4], [0.5] * 4)
        for length in lengths[4:]:
            self.assertAlmostEqual(length, 0.5 * math.sqrt(2.0))

    def test_no_corner_cutting(self):
        world = GridWorld.from_text("grid 2 2 1.0\n.#\n..\n")
        g = build_grid_roadmap(world, 8)
        self.assertEqual(len(g), 3)
        self.assertEqual(g.edge_count, 2)
        self.assertEqual(g.cells, [(0, 0), (1, 0), (1, 1)])

    def test_rejects_bad_connectivity(self):
        with self.assertRaises(InvalidParameter):
            build_grid_roadmap(_open_grid(2, 2), 6)

    def test_refined_strip_is_zone_pure(self):
        g = build_grid_roadmap(STRIP, 8)
        refined = refine(g, STRIP)
        _assert_zone_pure(self, refined)
        self.assertGreater(refined.n_border, 0)
        for b in refined.border_ids:
            self.assertTrue(refined.is_border(b))
            self.assertIs(refined.zones[b], Zone.BORDER)

    def test_grid_border_sits_halfway(self):
        g = build_grid_roadmap(STRIP, 4)
        refined = refine(g, STRIP)
        u = g.cells.index((1, 1))
        v = g.cells.index((1, 2))
        border = [e.target for e in refined.adjacency[u] if refined.zones[e.target] is Zone.BORDER]
        self.assertEqual(len(border), 1)
        b = border[0]
        self.assertEqual(refined.points[b], (2.0, 1.5))
        self.assertEqual(refined.edge_between(u, b).length, 0.5)
        self.assertIs(refined.edge_between(u, b).zone, Zone.SAFE)
        self.assertIs(refined.edge_between(b, v).zone, Zone.RISK)
        self.assertIsNone(refined.edge_between(u, v))

    def test_refinement_preserves_shortest_lengths(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            world = random_grid_world(rng, 8, 8, risk_prob=0.4, obstacle_prob=0.15)
            g = build_grid_roadmap(world, 8)
            if len(g) < 2:
                continue
            original = nx.Graph()
            original.add_weighted_edges_from(g.edges, weight="length")
            original.add_nodes_from(range(len(g)))
            refined = to_networkx(refine(g, world))
            before = nx.single_source_dijkstra_path_length(original, 0, weight="length")
            after = nx.single_source_dijkstra_path_length(refined, 0, weight="length")
            for v, d in before.items():
                self.assertAlmostEqual(after[v], d, places=9)


class PolygonRefineTest(unittest.TestCase):
    def test_single_crossing_split(self):
        world = PolygonWorld(risk=[[[0.4, 0.0], [2.0, 0.0], [2.0, 1.0], [0.4, 1.0]]], bounds=(0.0, 0.0, 2.0, 1.0))
        g = Roadmap([(0.0, 0.5), (1.0, 0.5)], [Zone.SAFE, Zone.RISK], [(0, 1, 1.0)])
        refined = refine(g, world)
        self.assertEqual(refined.border_ids, (2,))
        self.assertIs(refined.zones[0], Zone.SAFE)
        self.assertAlmostEqual(refined.points[2][0], 0.4)
        self.assertAlmostEqual(refined.edge_between(0, 2).length, 0.4)
        self.assertAlmostEqual(refined.edge_between(2, 1).length, 0.6)
        self.assertEqual(refined.label(2), "b2")
        self.assertEqual(refined.provenance[(1, 2)], 0)

    def test_double_crossing_inserts_two_borders(self):
        world = PolygonWorld(risk=[[[0.4, 0.0], [0.6, 0.0], [0.6, 1.0], [0.4, 1.0]]])
        g = Roadmap([(0.1, 0.5), (0.9, 0.5)], [Zone.SAFE, Zone.SAFE], [(0, 1, 0.8)])
        refined = refine(g, world)
        self.assertEqual(refined.n_border, 2)
        self.assertEqual(refined.edge_count(), 3)
        _assert_zone_pure(self, refined)
        pieces = [refined.edge_between(0, 2), refined.edge_between(2, 3), refined.edge_between(3, 1)]
        self.assertEqual([p.zone for p in pieces], [Zone.SAFE, Zone.RISK, Zone.SAFE])
        self.assertAlmostEqual(sum(p.length for p in pieces), 0.8)
        self.assertAlmostEqual(pieces[1].length, 0.2)


class ExplicitGraphTest(unittest.TestCase):
    def test_detour_promotes_entry_vertices(self):
        g = Roadmap.from_dict(detour_graph())
        refined = refine(g)
        self.assertEqual(len(refined), 5)
        self.assertEqual(refined.border_ids, (1, 2))
        self.assertIs(refined.zones[0], Zone.SAFE)
        self.assertIs(refined.zones[3], Zone.RISK)
        self.assertEqual(g.vertex_id("z"), 4)
        self.assertEqual((g.start, g.goal), (0, 4))

    def test_crossing_hint_inserts_border(self):
        g = Roadmap.from_dict({
            "vertices": [{"x": 0, "y": 0, "zone": "safe"}, {"x": 2, "y": 0, "zone": "risk"}],
            "edges": [{"u": 0, "v": 1, "length": 2.0, "crossing": 0.25}],
        })
        refined = refine(g)
        self.assertEqual(refined.border_ids, (2,))
        self.assertIs(refined.zones[0], Zone.SAFE)
        self.assertAlmostEqual(refined.edge_between(0, 2).length, 0.5)
        self.assertAlmostEqual(refined.edge_between(2, 1).length, 1.5)
        self.assertEqual(refined.points[2], (0.5, 0.0))

    def test_hint_measured_from_safe_end_when_reversed(self):
        g = Roadmap.from_dict({
            "vertices": [{"x": 0, "y": 0, "zone": "risk"}, {"x": 4, "y": 0, "zone": "safe"}],
            "edges": [{"u": 0, "v": 1, "crossing": 0.25}],
        })
        refined = refine(g)
        self.assertAlmostEqual(refined.edge_between(1, 2).length, 1.0)
        self.assertAlmostEqual(refined.edge_between(2, 0).length, 3.0)

    def test_validation(self):
        pts = [(0.0, 0.0), (1.0, 0.0)]
        with self.assertRaises(InvalidParameter):
            Roadmap(pts, [Zone.SAFE, Zone.SAFE], [(0, 0, 1.0)])
        with self.assertRaises(InvalidParameter):
            Roadmap(pts, [Zone.SAFE, Zone.SAFE], [(0, 1, 0.0)])
        with self.assertRaises(InvalidParameter):
            Roadmap(pts, [Zone.SAFE, Zone.SAFE], [(0, 1, 1.0), (1, 0, 1.0)])
        with self.assertRaises(InvalidParameter):
            Roadmap(pts, [Zone.SAFE, Zone.OBSTACLE], [])
        with self.assertRaises(InvalidParameter):
            Roadmap(pts, [Zone.SAFE, Zone.SAFE], [(0, 2, 1.0)])

    def test_bad_graph_json(self):
        with self.assertRaises(ScenarioParseError):
            Roadmap.from_dict({"edges": []})
        with self.assertRaises(ScenarioParseError):
            Roadmap.from_dict({"vertices": [{"x": 0, "y": 0}, {"x": 1, "y": 0}],
                               "edges": [{"u": 0, "v": 1, "crossing": 1.5}]})
        with self.assertRaises(ScenarioParseError):
            Roadmap.from_dict({"vertices": [{"x": 0, "y": 0}], "edges": [{"u": 0, "v": 7}]})

    def test_unknown_vertex_name(self):
        g = Roadmap.from_dict(detour_graph())
        with self.assertRaises(InvalidQuery):
            g.vertex_id("nowhere")
        with self.assertRaises(InvalidQuery):
            g.vertex_id(9)

    def test_dict_round_trip(self):
        g = Roadmap.from_dict(detour_graph())
        again = Roadmap.from_dict(g.to_dict())
        self.assertEqual(again.edges, g.edges)
        self.assertEqual(again.zones, g.zones)
        self.assertEqual(again.names, g.names)


class HaltonRoadmapTest(unittest.TestCase):
    def setUp(self) -> None:
        self.world = PolygonWorld(obstacles=[[[0.4, 0.4], [0.6, 0.4], [0.6, 0.6], [0.4, 0.6]]])

    def test_deterministic_and_collision_free(self):
        a = build_halton_roadmap(self.world, 80, 0.25)
        b = build_halton_roadmap(self.world, 80, 0.25)
        self.assertEqual(a.points, b.points)
        self.assertEqual(a.edges, b.edges)
        for (x, y) in a.points:
            self.assertIsNot(self.world.classify_point((x, y)), Zone.OBSTACLE)
        for u, v, length in a.edges:
            self.assertLessEqual(length, 0.25)
            self.assertTrue(self.world.is_segment_free(a.points[u], a.points[v]))
        self.assertEqual(a.metadata["connection_rule"], "radius")

    def test_offset_changes_samples(self):
        a = build_halton_roadmap(self.world, 30, 0.3)
        b = build_halton_roadmap(self.world, 30, 0.3, offset=5)
        self.assertNotEqual(a.points, b.points)

    def test_extra_points_are_appended(self):
        g = build_halton_roadmap(self.world, 40, 0.3, extra_points=[(0.05, 0.05), (0.95, 0.95)])
        ids = g.metadata["extra_ids"]
        self.assertEqual(ids, [len(g) - 2, len(g) - 1])
        self.assertEqual(g.points[ids[0]], (0.05, 0.05))

    def test_extra_point_in_obstacle(self):
        with self.assertRaises(InvalidQuery):
            build_halton_roadmap(self.world, 40, 0.3, extra_points=[(0.5, 0.5)])

    def test_query_points_alone_are_not_a_roadmap(self):
        walled = PolygonWorld(obstacles=[{
            "shell": [[-1.0, -1.0], [2.0, -1.0], [2.0, 2.0], [-1.0, 2.0]],
            "holes": [[[0.0005, 0.0005], [0.0015, 0.0005], [0.0015, 0.0015], [0.0005, 0.0015]]],
        }])
        self.assertIs(walled.classify_point((0.001, 0.001)), Zone.SAFE)
        with self.assertRaises(EmptyRoadmap):
            build_halton_roadmap(walled, 20, 0.3, extra_points=[(0.001, 0.001)])

    def test_parameter_checks(self):
        with self.assertRaises(InvalidParameter):
            build_halton_roadmap(self.world, 1, 0.3)
        with self.assertRaises(InvalidParameter):
            build_halton_roadmap(self.world, 10, 0.0)


if __name__ == "__main__":
    unittest.main()
