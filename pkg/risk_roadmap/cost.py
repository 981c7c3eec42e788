"""Exponential exposure cost.

Time spent in Safe regions costs one unit per unit length. Inside a risk
excursion the running exposure ``lam`` grows with the distance travelled and
the instantaneous cost is ``exp(alpha * lam)``; leaving the excursion resets
``lam`` to zero. All lengths double as travel times (unit speed).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from scipy import integrate

from .errors import InvalidParameter, NotAnEdge
from .roadmap import RefinedRoadmap
from .world import Zone

# Relative tolerance used by tests and oracle comparisons.
COST_RTOL = 1e-9


def segment_cost(lambda0: float, delta: float, zone: Zone, alpha: float = 1.0) -> Tuple[float, float]:
    """Cost of moving ``delta`` through ``zone`` with exposure ``lambda0`` on entry.

    Returns ``(cost, lambda_after)``.
    """
    if lambda0 < 0 or delta < 0:
        raise InvalidParameter("lambda0 and delta must be non-negative")
    if not alpha > 0:
        raise InvalidParameter("alpha must be positive")
    zone = Zone(zone)
    if zone is Zone.RISK:
        cost = math.exp(alpha * lambda0) * math.expm1(alpha * delta) / alpha
        return cost, lambda0 + delta
    if zone is Zone.OBSTACLE:
        raise InvalidParameter("no cost is defined inside obstacles")
    if lambda0 > 0:
        raise InvalidParameter(f"a {zone.value} segment cannot start with positive exposure")
    return float(delta), 0.0


def excursion_cost(duration: float, alpha: float = 1.0) -> float:
    """Cost of one whole risk excursion of the given duration."""
    return math.expm1(alpha * duration) / alpha


@dataclass(frozen=True)
class Excursion:
    """One maximal risk stretch; ``exit`` is None when the path ends inside it."""

    entry: int
    exit: Optional[int]
    duration: float
    cost: float


@dataclass
class CostBreakdown:
    total_cost: float
    total_time: float
    safe_time: float
    excursions: List[Excursion] = field(default_factory=list)
    final_lambda: float = 0.0

    @property
    def risk_time(self) -> float:
        return self.total_time - self.safe_time

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["risk_time"] = self.risk_time
        return data


def _path_edges(g: RefinedRoadmap, path: Sequence[int]):
    for a, b in zip(path, path[1:]):
        edge = g.edge_between(a, b)
        if edge is None:
            raise NotAnEdge(f"({g.label(a)}, {g.label(b)}) is not an edge of the roadmap")
        yield a, b, edge


def path_cost(g: RefinedRoadmap, path: Sequence[int], alpha: float = 1.0) -> CostBreakdown:
    """Fold ``segment_cost`` along ``path`` and report per-excursion detail.

    Exposure resets on arriving at any non-Risk vertex. A path that starts in
    Risk opens its first excursion at the start vertex.
    """
    if not path:
        raise InvalidParameter("empty path")
    lam = 0.0
    total = 0.0
    elapsed = 0.0
    safe_time = 0.0
    excursions: List[Excursion] = []
    entry = path[0] if g.zones[path[0]] is Zone.RISK else None
    excursion_total = 0.0
    for a, b, edge in _path_edges(g, path):
        if edge.zone is Zone.RISK and entry is None:
            entry = a
            excursion_total = 0.0
        cost, lam = segment_cost(lam, edge.length, edge.zone, alpha)
        total += cost
        elapsed += edge.length
        if edge.zone is Zone.RISK:
            excursion_total += cost
        else:
            safe_time += edge.length
        if g.zones[b] is not Zone.RISK:
            if entry is not None:
                excursions.append(Excursion(entry, b, lam, excursion_total))
                entry = None
            lam = 0.0
    if entry is not None and len(path) > 1:
        excursions.append(Excursion(entry, None, lam, excursion_total))
    return CostBreakdown(total, elapsed, safe_time, excursions, lam)


def exposure_profile(g: RefinedRoadmap, path: Sequence[int]) -> List[Tuple[float, float]]:
    """Piecewise-linear ``(t, lam)`` breakpoints along ``path``.

    One breakpoint per vertex; leaving an excursion adds a second breakpoint
    at the same ``t`` with ``lam`` back at zero.
    """
    if not path:
        raise InvalidParameter("empty path")
    t = 0.0
    lam = 0.0
    profile = [(0.0, 0.0)]
    for a, b, edge in _path_edges(g, path):
        t += edge.length
        if edge.zone is Zone.RISK:
            lam += edge.length
        profile.append((t, lam))
        if g.zones[b] is not Zone.RISK and lam > 0:
            lam = 0.0
            profile.append((t, 0.0))
    return profile


def integrate_profile(profile: Sequence[Tuple[float, float]], alpha: float = 1.0) -> float:
    """Numerically integrate the cost rate over an exposure profile.

    Flat pieces at zero exposure are Safe travel (rate 1); rising pieces are
    risk travel (rate ``exp(alpha * lam)``). Used to cross-check the closed form.
    """
    total = 0.0
    for (t0, l0), (t1, l1) in zip(profile, profile[1:]):
        if t1 <= t0:
            continue
        if l1 == l0 == 0.0:
            total += t1 - t0
            continue
        slope = (l1 - l0) / (t1 - t0)
        value, _ = integrate.quad(lambda s: math.exp(alpha * (l0 + slope * (s - t0))), t0, t1)
        total += value
    return total


__all__ = [
    "COST_RTOL",
    "segment_cost",
    "excursion_cost",
    "Excursion",
    "CostBreakdown",
    "path_cost",
    "exposure_profile",
    "integrate_profile",
]
