#!/usr/bin/env python3
"""Write the detour scenario and the full-size synthetic benchmark scenarios."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from risk_roadmap.scenario import coastal_scenario, detour_scenario, narrow_passage_scenario  # noqa: E402

DEFAULT_OUT = REPO_ROOT / "data" / "scenarios"


def parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Generate the synthetic benchmark scenarios")
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT, help="Output directory")
    parser.add_argument("--size", type=int, default=201, help="Coastal grid resolution (cells per side)")
    parser.add_argument("--islands", type=int, default=0, help="Random islands in the coastal lake")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--halton-n", type=int, default=2000, dest="halton_n")
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    scenarios = [
        detour_scenario(),
        coastal_scenario(args.size, islands=args.islands, seed=args.seed),
        narrow_passage_scenario(args.halton_n, offset=args.seed),
    ]
    for scenario in scenarios:
        path = args.out / f"{scenario.name}.json"
        path.write_text(scenario.to_json(), encoding="utf-8")
        print(f"Wrote {path.relative_to(REPO_ROOT) if path.is_relative_to(REPO_ROOT) else path}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
