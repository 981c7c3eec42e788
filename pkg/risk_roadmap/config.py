"""Configuration loading and planner option resolution.

Precedence, highest first: CLI flags, scenario ``options`` block,
``config.json``, built-in defaults.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from .errors import InvalidParameter

PROJECT_ROOT = Path(__file__).resolve().parents[1]
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "config.json"

ALGORITHMS = ("incremental", "astar", "precompute", "dijkstra", "minrisk")

DEFAULT_CONFIG: Dict[str, Any] = {
    "debug": False,
    "clean_logs": True,
    "algorithm": "incremental",
    "alpha": 1.0,
    "heuristic": "euclidean",
    "domination_pruning": True,
    "evict_dominated": True,
    "trace": False,
    "memory_budget_bytes": 2_000_000_000,
    "apsp_workers": 1,
    "oracle_max_vertices": 14,
    "bench_repetitions": 5,
    "default_connectivity": 8,
    "halton_radius": 0.02,
    "seed": 0,
}


def _safe_load_json(path: Path, default: Any) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except Exception:
        return default


def load_config(path: Optional[Path] = None) -> Dict[str, Any]:
    """Return DEFAULT_CONFIG overlaid with the JSON file (missing/corrupt → defaults)."""
    merged = dict(DEFAULT_CONFIG)
    data = _safe_load_json(Path(path) if path else DEFAULT_CONFIG_PATH, {})
    if isinstance(data, dict):
        merged.update({k: v for k, v in data.items() if v is not None})
    return merged


@dataclass(frozen=True)
class PlannerOptions:
    algorithm: str = "incremental"
    heuristic: Optional[str] = "euclidean"
    domination_pruning: bool = True
    evict_dominated: bool = True
    alpha: float = 1.0
    trace: bool = False
    memory_budget_bytes: Optional[int] = None
    apsp_workers: int = 1

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise InvalidParameter(f"unknown algorithm '{self.algorithm}'")
        if not self.alpha > 0:
            raise InvalidParameter("alpha must be positive")
        if self.heuristic not in (None, "none", "zero", "euclidean"):
            raise InvalidParameter(f"unknown heuristic '{self.heuristic}'")
        if self.apsp_workers < 1:
            raise InvalidParameter("apsp_workers must be >= 1")

    def with_changes(self, **changes: Any) -> "PlannerOptions":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_OPTION_KEYS = {
    "algorithm": str,
    "heuristic": lambda v: None if v in (None, "none") else str(v),
    "domination_pruning": bool,
    "evict_dominated": bool,
    "alpha": float,
    "trace": bool,
    "memory_budget_bytes": lambda v: None if v is None else int(v),
    "apsp_workers": int,
}


def resolve_options(
    config: Optional[Mapping[str, Any]] = None,
    scenario_options: Optional[Mapping[str, Any]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> PlannerOptions:
    values: Dict[str, Any] = {}
    for layer in (DEFAULT_CONFIG, config or {}, scenario_options or {}, overrides or {}):
        for key, convert in _OPTION_KEYS.items():
            if key in layer and layer[key] is not None:
                values[key] = convert(layer[key])
    return PlannerOptions(**values)


__all__ = [
    "ALGORITHMS",
    "DEFAULT_CONFIG",
    "DEFAULT_CONFIG_PATH",
    "PlannerOptions",
    "load_config",
    "resolve_options",
]
