from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from risk_roadmap.cost import (
    Excursion,
    excursion_cost,
    exposure_profile,
    integrate_profile,
    path_cost,
    segment_cost,
)
from risk_roadmap.errors import InvalidParameter, NotAnEdge
from risk_roadmap.roadmap import Roadmap, refine
from risk_roadmap.scenario import detour_graph, random_small_roadmap
from risk_roadmap.world import Zone

X_S, X1, X2, Y, Z = range(5)


class SegmentCostTest(unittest.TestCase):
    def test_safe_segment_costs_its_length(self):
        self.assertEqual(segment_cost(0.0, 2.0, Zone.SAFE), (2.0, 0.0))
        self.assertEqual(segment_cost(0.0, 1.25, Zone.BORDER), (1.25, 0.0))

    def test_fresh_excursion(self):
        cost, lam = segment_cost(0.0, 1.5, Zone.RISK)
        self.assertAlmostEqual(cost, math.e ** 1.5 - 1.0, places=12)
        self.assertEqual(lam, 1.5)

    def test_continued_excursion(self):
        cost, lam = segment_cost(1.0, 0.5, Zone.RISK)
        self.assertAlmostEqual(cost, math.exp(1.5) - math.exp(1.0), places=12)
        self.assertEqual(lam, 1.5)

    def test_alpha_scales_exponent(self):
        cost, _ = segment_cost(0.0, 1.0, Zone.RISK, alpha=2.0)
        self.assertAlmostEqual(cost, (math.exp(2.0) - 1.0) / 2.0, places=12)

    def test_zero_length_is_free(self):
        self.assertEqual(segment_cost(0.7, 0.0, Zone.RISK), (0.0, 0.7))

    def test_rejections(self):
        with self.assertRaises(InvalidParameter):
            segment_cost(0.0, -1.0, Zone.SAFE)
        with self.assertRaises(InvalidParameter):
            segment_cost(-0.1, 1.0, Zone.RISK)
        with self.assertRaises(InvalidParameter):
            segment_cost(0.0, 1.0, Zone.RISK, alpha=0.0)
        with self.assertRaises(InvalidParameter):
            segment_cost(0.0, 1.0, Zone.OBSTACLE)
        with self.assertRaises(InvalidParameter):
            segment_cost(0.5, 1.0, Zone.SAFE)

    def test_split_excursion_matches_whole(self):
        first, lam = segment_cost(0.0, 0.8, Zone.RISK)
        second, _ = segment_cost(lam, 1.7, Zone.RISK)
        self.assertAlmostEqual(first + second, excursion_cost(2.5), places=12)


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(min_value=0.01, max_value=5.0),
    b=st.floats(min_value=0.01, max_value=5.0),
    alpha=st.floats(min_value=0.1, max_value=3.0),
)
def test_excursions_are_strictly_superadditive(a, b, alpha):
    assert excursion_cost(a + b, alpha) > excursion_cost(a, alpha) + excursion_cost(b, alpha)


@settings(max_examples=100, deadline=None)
@given(
    pieces=st.lists(st.floats(min_value=0.0, max_value=2.0), min_size=1, max_size=6),
    alpha=st.floats(min_value=0.1, max_value=2.0),
)
def test_piecewise_excursion_is_path_independent(pieces, alpha):
    lam = 0.0
    total = 0.0
    for delta in pieces:
        cost, lam = segment_cost(lam, delta, Zone.RISK, alpha)
        total += cost
    assert math.isclose(total, excursion_cost(sum(pieces), alpha), rel_tol=1e-9, abs_tol=1e-12)


class PathCostTest(unittest.TestCase):
    def setUp(self) -> None:
        self.g = refine(Roadmap.from_dict(detour_graph()))

    def test_best_route_to_y(self):
        breakdown = path_cost(self.g, [X_S, X1, Y])
        self.assertAlmostEqual(breakdown.total_cost, 3.9816890703380645, places=9)
        self.assertEqual(breakdown.final_lambda, 1.5)
        self.assertEqual(breakdown.safe_time, 0.5)
        self.assertEqual(breakdown.risk_time, 1.5)

    def test_routes_to_z(self):
        via_x2 = path_cost(self.g, [X_S, X2, Y, Z])
        via_x1 = path_cost(self.g, [X_S, X1, Y, Z])
        self.assertAlmostEqual(via_x2.total_cost, 6.4816890703380645, places=9)
        self.assertAlmostEqual(via_x1.total_cost, 6.88905609893065, places=9)
        self.assertEqual(via_x2.total_time, 4.5)
        self.assertEqual(len(via_x2.excursions), 1)
        open_excursion = via_x2.excursions[0]
        self.assertEqual((open_excursion.entry, open_excursion.exit), (X2, None))
        self.assertEqual(open_excursion.duration, 1.5)
        self.assertAlmostEqual(open_excursion.cost, math.expm1(1.5), places=12)
        self.assertEqual(via_x2.final_lambda, 1.5)

    def test_breakdown_sums_to_total(self):
        for path in ([X_S, X1, Y], [X_S, X2, Y, Z], [X_S, X1, Y, X2], [Y, Z], [Y, X2], [X_S, X2]):
            breakdown = path_cost(self.g, path)
            parts = breakdown.safe_time + sum(e.cost for e in breakdown.excursions)
            self.assertAlmostEqual(parts, breakdown.total_cost, places=12, msg=path)
            self.assertAlmostEqual(sum(e.duration for e in breakdown.excursions), breakdown.risk_time,
                                   places=12, msg=path)

    def test_closed_excursion_is_reported(self):
        breakdown = path_cost(self.g, [X_S, X1, Y, X2])
        self.assertAlmostEqual(breakdown.total_cost, 0.5 + math.expm1(2.5), places=9)
        self.assertEqual(len(breakdown.excursions), 1)
        excursion = breakdown.excursions[0]
        self.assertEqual((excursion.entry, excursion.exit), (X1, X2))
        self.assertEqual(excursion.duration, 2.5)
        self.assertAlmostEqual(excursion.cost, math.expm1(2.5), places=9)
        self.assertEqual(breakdown.final_lambda, 0.0)
        self.assertIn("risk_time", breakdown.to_dict())

    def test_path_starting_in_risk(self):
        breakdown = path_cost(self.g, [Y, X2])
        self.assertAlmostEqual(breakdown.total_cost, math.e - 1.0, places=12)
        self.assertEqual(breakdown.excursions, [Excursion(Y, X2, 1.0, breakdown.total_cost)])

    def test_single_vertex_path(self):
        breakdown = path_cost(self.g, [X_S])
        self.assertEqual((breakdown.total_cost, breakdown.total_time), (0.0, 0.0))

    def test_non_edge_and_empty_path(self):
        with self.assertRaises(NotAnEdge):
            path_cost(self.g, [X_S, Y])
        with self.assertRaises(InvalidParameter):
            path_cost(self.g, [])

    def test_exposure_profile_breakpoints(self):
        self.assertEqual(exposure_profile(self.g, [X_S, X1, Y]), [(0.0, 0.0), (0.5, 0.0), (2.0, 1.5)])
        profile = exposure_profile(self.g, [X_S, X1, Y, X2])
        self.assertEqual(profile[-2:], [(3.0, 2.5), (3.0, 0.0)])

    def test_quadrature_matches_closed_form(self):
        for path in ([X_S, X1, Y], [X_S, X2, Y, Z], [X_S, X1, Y, X2], [Y, Z]):
            for alpha in (0.5, 1.0, 2.0):
                closed = path_cost(self.g, path, alpha).total_cost
                numeric = integrate_profile(exposure_profile(self.g, path), alpha)
                self.assertTrue(math.isclose(closed, numeric, rel_tol=1e-7), (path, alpha))


class RandomPathQuadratureTest(unittest.TestCase):
    """Closed-form path costs against numeric integration of the exposure profile."""

    def test_random_walks_on_random_roadmaps(self):
        rng = np.random.default_rng(5)
        checked = 0
        while checked < 1000:
            g = refine(random_small_roadmap(rng, int(rng.integers(4, 9))))
            for _ in range(10):
                v = int(rng.integers(len(g)))
                path = [v]
                for _ in range(int(rng.integers(1, 9))):
                    if not g.adjacency[v]:
                        break
                    v = g.adjacency[v][int(rng.integers(len(g.adjacency[v])))].target
                    path.append(v)
                if len(path) < 2:
                    continue
                alpha = float(rng.uniform(0.25, 2.0))
                breakdown = path_cost(g, path, alpha)
                numeric = integrate_profile(exposure_profile(g, path), alpha)
                self.assertTrue(math.isclose(breakdown.total_cost, numeric, rel_tol=1e-6), (path, alpha))
                parts = breakdown.safe_time + sum(e.cost for e in breakdown.excursions)
                self.assertTrue(math.isclose(parts, breakdown.total_cost, rel_tol=1e-9), path)
                checked += 1


if __name__ == "__main__":
    unittest.main()
