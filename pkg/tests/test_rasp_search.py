from __future__ import annotations

import json
import math
import sys
import unittest
from pathlib import Path

import numpy as np

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from risk_roadmap.baselines import dijkstra_shortest
from risk_roadmap.config import PlannerOptions
from risk_roadmap.errors import InternalError, InvalidComparison, InvalidQuery
from risk_roadmap.rasp_search import (
    START_BORDER,
    RaspEntry,
    SearchQueue,
    astar_search,
    dominates,
    euclidean_heuristic,
    expand,
    finalized_labels,
    incremental_search,
    iter_channels,
)
from risk_roadmap.roadmap import BorderEdge, RefinedEdge, Roadmap, build_grid_roadmap, refine
from risk_roadmap.scenario import detour_graph, random_grid_world
from risk_roadmap.world import Zone

X_S, X1, X2, Y, Z = range(5)
GOLDEN_TRACE = PROJECT_ROOT / "tests" / "data" / "detour_trace.json"


def _detour(goal: str = "z"):
    return refine(Roadmap.from_dict(detour_graph(goal)))


class ExpandTest(unittest.TestCase):
    def setUp(self) -> None:
        self.g = _detour()
        self.zones = self.g.zones

    def test_safe_to_safe(self):
        child = expand(RaspEntry(X_S, 0.0, 0.0, 0.0), RefinedEdge(X1, 0.5, Zone.SAFE), self.zones)
        self.assertEqual((child.u, child.c, child.t, child.lam, child.phi), (X1, 0.5, 0.5, 0.0, None))

    def test_border_into_risk_opens_channel(self):
        tau = RaspEntry(X1, 0.5, 0.5, 0.0)
        child = expand(tau, RefinedEdge(Y, 1.5, Zone.RISK), self.zones)
        self.assertAlmostEqual(child.c, 3.9816890703380645, places=12)
        self.assertEqual((child.u, child.t, child.lam, child.phi), (Y, 2.0, 1.5, X1))
        self.assertIs(child.parent, tau)

    def test_risk_to_risk_keeps_channel(self):
        tau = RaspEntry(Y, 4.718281828459045, 4.0, 1.0, None, X2)
        child = expand(tau, RefinedEdge(Z, 0.5, Zone.RISK), self.zones)
        self.assertAlmostEqual(child.c, 6.4816890703380645, places=12)
        self.assertEqual((child.lam, child.phi, child.t), (1.5, X2, 4.5))

    def test_risk_to_border_closes_excursion(self):
        tau = RaspEntry(Y, 3.9816890703380645, 2.0, 1.5, None, X1)
        child = expand(tau, RefinedEdge(X2, 1.0, Zone.RISK), self.zones)
        self.assertAlmostEqual(child.c, 0.5 + math.expm1(2.5), places=12)
        self.assertEqual((child.lam, child.phi), (0.0, None))

    def test_alpha_is_applied(self):
        child = expand(RaspEntry(X1, 0.0, 0.0, 0.0), RefinedEdge(Y, 1.0, Zone.RISK), self.zones, alpha=2.0)
        self.assertAlmostEqual(child.c, math.expm1(2.0) / 2.0, places=12)

    def test_border_edges_are_charged_piecewise(self):
        zones = [Zone.SAFE, Zone.RISK, Zone.BORDER]
        into = expand(RaspEntry(0, 0.0, 0.0, 0.0), BorderEdge(1, 2.0, 0.5, 2), zones)
        self.assertAlmostEqual(into.c, 0.5 + math.expm1(1.5), places=12)
        self.assertEqual((into.lam, into.phi), (1.5, 2))
        out = expand(RaspEntry(1, 1.0, 1.0, 1.0, None, 2), BorderEdge(0, 2.0, 1.5, 2), zones)
        self.assertAlmostEqual(out.c, 1.0 + math.e * math.expm1(1.5) + 0.5, places=12)
        self.assertEqual((out.lam, out.phi), (0.0, None))

    def test_inconsistent_labels_are_internal_errors(self):
        with self.assertRaises(InternalError):
            expand(RaspEntry(X_S, 0.0, 0.0, 0.3), RefinedEdge(X1, 0.5, Zone.SAFE), self.zones)
        with self.assertRaises(InternalError):
            expand(RaspEntry(X_S, 0.0, 0.0, 0.0), RefinedEdge(X1, 0.5, Zone.RISK), self.zones)


class DominatesTest(unittest.TestCase):
    def test_incomparable_pair(self):
        a = RaspEntry(Y, 3.9817, 2.0, 1.5, None, X1)
        b = RaspEntry(Y, 4.7183, 4.0, 1.0, None, X2)
        self.assertFalse(dominates(a, b))
        self.assertFalse(dominates(b, a))

    def test_cheaper_and_less_exposed_wins(self):
        a = RaspEntry(Y, 3.0, 2.0, 1.0, None, X1)
        b = RaspEntry(Y, 4.0, 2.0, 1.5, None, X2)
        self.assertTrue(dominates(a, b))
        self.assertFalse(dominates(b, a))
        self.assertTrue(dominates(a, a))

    def test_different_vertices(self):
        with self.assertRaises(InvalidComparison):
            dominates(RaspEntry(Y, 1.0, 1.0, 0.0), RaspEntry(Z, 1.0, 1.0, 0.0))


class SearchQueueTest(unittest.TestCase):
    def test_ties_break_on_exposure_then_vertex(self):
        q = SearchQueue()
        q.add_with_priority(RaspEntry(5, 1.0, 0.0, 0.5, None, 1), 1.0)
        q.add_with_priority(RaspEntry(4, 1.0, 0.0, 0.5, None, 1), 1.0)
        q.add_with_priority(RaspEntry(6, 1.0, 0.0, 0.2, None, 1), 1.0)
        self.assertEqual([q.extract_min()[1].u for _ in range(3)], [6, 4, 5])
        with self.assertRaises(IndexError):
            q.extract_min()

    def test_decrease_and_remove(self):
        q = SearchQueue()
        a = RaspEntry(1, 5.0, 0.0, 0.0)
        q.add_with_priority(a, 5.0)
        q.add_with_priority(RaspEntry(2, 3.0, 0.0, 0.0), 3.0)
        q.decrease_priority(RaspEntry(1, 1.0, 0.0, 0.0), 1.0)
        self.assertEqual(len(q), 2)
        priority, entry = q.extract_min()
        self.assertEqual((priority, entry.u, entry.c), (1.0, 1, 1.0))
        q.remove((2, None))
        self.assertNotIn((2, None), q)
        with self.assertRaises(IndexError):
            q.extract_min()

    def test_misuse(self):
        q = SearchQueue()
        q.add_with_priority(RaspEntry(1, 2.0, 0.0, 0.0), 2.0)
        with self.assertRaises(InternalError):
            q.add_with_priority(RaspEntry(1, 1.0, 0.0, 0.0), 1.0)
        with self.assertRaises(InternalError):
            q.decrease_priority(RaspEntry(1, 3.0, 0.0, 0.0), 3.0)
        with self.assertRaises(InternalError):
            q.decrease_priority(RaspEntry(9, 1.0, 0.0, 0.0), 1.0)


class DetourSearchTest(unittest.TestCase):
    def test_best_route_to_y_goes_through_x1(self):
        result = incremental_search(_detour("y"), X_S, Y)
        self.assertTrue(result.reachable)
        self.assertEqual(result.path, [X_S, X1, Y])
        self.assertAlmostEqual(result.cost, 0.5 + math.exp(1.5) - 1.0, places=9)
        self.assertAlmostEqual(result.search_cost, result.cost, places=12)

    def test_best_route_to_z_goes_through_x2(self):
        result = incremental_search(_detour(), X_S, Z)
        self.assertEqual(result.path, [X_S, X2, Y, Z])
        self.assertAlmostEqual(result.cost, 3.0 + math.exp(1.5) - 1.0, places=9)
        self.assertEqual(result.metadata["n_border"], 2)
        self.assertEqual(result.stats.evicted, 1)

    def test_queue_evolution_matches_golden_trace(self):
        golden = json.loads(GOLDEN_TRACE.read_text(encoding="utf-8"))["events"]
        result = incremental_search(_detour(), X_S, Z, PlannerOptions(trace=True))
        self.assertEqual(len(result.trace), len(golden))
        for event, expected in zip(result.trace, golden):
            self.assertEqual((event.event, event.vertex, event.phi),
                             (expected["event"], expected["vertex"], expected["phi"]))
            self.assertAlmostEqual(event.cost, expected["cost"], places=9)

    def test_both_y_channels_are_finalized(self):
        labels = finalized_labels(_detour(), X_S)
        y_labels = sorted((e.phi, round(e.c, 4), e.lam) for e in labels[Y])
        self.assertEqual(y_labels, [(X1, 3.9817, 1.5), (X2, 4.7183, 1.0)])
        self.assertEqual([e.phi for e in labels[Z]], [X2])
        keys = [key for key, _entry in iter_channels(labels)]
        self.assertEqual(len(keys), len(set(keys)))

    def test_pruning_switches(self):
        g = _detour()
        plain = incremental_search(g, X_S, Z, PlannerOptions(domination_pruning=False, evict_dominated=False))
        self.assertAlmostEqual(plain.cost, 3.0 + math.exp(1.5) - 1.0, places=9)
        self.assertEqual(plain.stats.evicted, 0)

    def test_start_inside_risk(self):
        result = incremental_search(_detour(), Y, X_S, PlannerOptions(trace=True))
        self.assertEqual(result.path, [Y, X1, X_S])
        self.assertAlmostEqual(result.cost, math.expm1(1.5) + 0.5, places=9)
        self.assertEqual(result.trace[0].phi, START_BORDER)

    def test_unreachable_goal(self):
        g = refine(Roadmap([(0.0, 0.0), (1.0, 0.0), (5.0, 0.0)], [Zone.SAFE] * 3, [(0, 1, 1.0)]))
        result = incremental_search(g, 0, 2)
        self.assertFalse(result.reachable)
        self.assertTrue(math.isinf(result.cost))
        self.assertEqual(result.path, [])

    def test_invalid_query(self):
        with self.assertRaises(InvalidQuery):
            incremental_search(_detour(), X_S, 99)


class AstarTest(unittest.TestCase):
    def test_detour_with_euclidean_heuristic(self):
        result = astar_search(_detour(), X_S, Z, "euclidean")
        self.assertEqual(result.algorithm, "astar")
        self.assertAlmostEqual(result.cost, 3.0 + math.exp(1.5) - 1.0, places=9)

    def test_heuristic_is_scaled_for_short_edges(self):
        g = refine(Roadmap([(0.0, 0.0), (2.0, 0.0)], [Zone.SAFE, Zone.SAFE], [(0, 1, 1.0)]))
        h = euclidean_heuristic(g, 1)
        self.assertAlmostEqual(h(0), 1.0)
        self.assertEqual(h(1), 0.0)

    def test_matches_incremental_on_random_grids(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            world = random_grid_world(rng, 10, 10, risk_prob=0.45, obstacle_prob=0.1)
            g = refine(build_grid_roadmap(world, 8), world)
            if len(g.original) < 2:
                continue
            xs, xg = 0, len(g.original) - 1
            a = incremental_search(g, xs, xg)
            b = astar_search(g, xs, xg, "euclidean")
            self.assertEqual(a.reachable, b.reachable)
            if a.reachable:
                self.assertTrue(math.isclose(a.cost, b.cost, rel_tol=1e-9), (a.cost, b.cost))


class RiskFreeTest(unittest.TestCase):
    def test_trace_equals_dijkstra_on_risk_free_grids(self):
        rng = np.random.default_rng(5)
        options = PlannerOptions(trace=True)
        sizes = [7] * 40 + [20] * 6 + [50] * 4
        for size in sizes:
            world = random_grid_world(rng, size, size, risk_prob=0.0, obstacle_prob=0.2)
            g = refine(build_grid_roadmap(world, 8), world)
            if len(g) < 2:
                continue
            self.assertEqual(g.n_border, 0)
            xs, xg = 0, len(g) - 1
            ours = incremental_search(g, xs, xg, options)
            reference = dijkstra_shortest(g, xs, xg, options.with_changes(algorithm="dijkstra"))
            self.assertEqual(ours.trace, reference.trace)
            self.assertEqual(ours.path, reference.path)


if __name__ == "__main__":
    unittest.main()
