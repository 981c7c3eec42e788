"""Command-line entry point: ``plan``, ``bench``, ``oracle-check`` and ``render``.

Exit codes: 0 success, 2 goal unreachable, 3 bad input (parse errors, invalid
queries or parameters), 4 resource abort (memory budget, oracle size cap),
1 anything else.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .bench import BENCH_ALGORITHMS, bench
from .config import load_config, resolve_options
from .errors import OutputWriteError, RiskRoadmapError
from .log_utils import LogFn, clean_log_from_config, configure_logging
from .name_utils import resolve_algorithm
from .oracle import DEFAULT_MAX_VERTICES, cross_check
from .planner import run_plan
from .render import render_svg
from .scenario import Scenario

EXIT_OK = 0
EXIT_UNREACHABLE = 2


def _write_atomic(path: Path, data: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise OutputWriteError(str(path), exc.strerror or str(exc)) from exc


def _write_json(path: Path, payload: Any) -> None:
    _write_atomic(path, json.dumps(payload, indent=2, default=str) + "\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="config.json to use (default: repo root)")
    parser.add_argument("--alpha", type=float, default=None, help="Risk aversion exponent (default 1.0)")
    parser.add_argument("--seed", type=int, default=None,
                        help="Seed recorded in the output; Halton roadmaps use it as sequence offset")
    parser.add_argument("--memory-budget", type=int, default=None, dest="memory_budget",
                        help="Byte budget for the precompute planner's border table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risk_roadmap", description="Risk-aware minimal-cost path planning")
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="Run one planner on a scenario")
    plan.add_argument("--scenario", type=Path, required=True)
    plan.add_argument("--algo", default=None, help="incremental, astar, precompute, dijkstra or minrisk")
    plan.add_argument("--out", type=Path, default=None, help="Write the result JSON here")
    plan.add_argument("--svg", type=Path, default=None, help="Also render the path to this SVG")
    plan.add_argument("--trace", action="store_true", help="Record queue events in the result")
    plan.add_argument("--export-roadmap", type=Path, default=None, dest="export_roadmap",
                      help="Write the refined roadmap as explicit-graph JSON")
    _add_common(plan)

    bench_p = sub.add_parser("bench", help="Time planners over repeated runs")
    bench_p.add_argument("--scenario", type=Path, nargs="+", required=True)
    bench_p.add_argument("--algo", nargs="+", default=None)
    bench_p.add_argument("--reps", type=int, default=None)
    bench_p.add_argument("--out", type=Path, default=None, help="CSV report path")
    bench_p.add_argument("--workers", type=int, default=1, help="Benchmark scenarios concurrently")
    _add_common(bench_p)

    oracle = sub.add_parser("oracle-check", help="Compare planners with brute force on a small scenario")
    oracle.add_argument("--scenario", type=Path, required=True)
    oracle.add_argument("--max-vertices", type=int, default=None, dest="max_vertices")
    oracle.add_argument("--out", type=Path, default=None)
    _add_common(oracle)

    render = sub.add_parser("render", help="Render several planners' paths to one SVG")
    render.add_argument("--scenario", type=Path, required=True)
    render.add_argument("--algo", nargs="+", default=["incremental", "dijkstra", "minrisk"])
    render.add_argument("--svg", type=Path, required=True)
    _add_common(render)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    if getattr(args, "alpha", None) is not None:
        out["alpha"] = args.alpha
    if getattr(args, "memory_budget", None) is not None:
        out["memory_budget_bytes"] = args.memory_budget
    if getattr(args, "trace", False):
        out["trace"] = True
    algo = getattr(args, "algo", None)
    if isinstance(algo, str):
        out["algorithm"] = resolve_algorithm(algo)
    return out


def _load(args: argparse.Namespace) -> Scenario:
    scenario = Scenario.load(args.scenario)
    if args.seed is not None:
        scenario.seed = args.seed
        if scenario.roadmap.get("kind") == "halton":
            scenario.roadmap["offset"] = args.seed
    return scenario


def _cmd_plan(args: argparse.Namespace, config: Dict[str, Any], log: LogFn) -> int:
    scenario = _load(args)
    options = resolve_options(config, scenario.options, _overrides(args))
    prepared = scenario.prepare(options)
    g = prepared.refined
    log(f"{scenario.name}: {len(g)} vertices ({g.n_border} border), {options.algorithm}, "
        f"alpha={options.alpha:g}", "🚀")
    if args.export_roadmap:
        _write_json(args.export_roadmap, g.to_dict())
        log(f"Roadmap written to {args.export_roadmap}", "💾", show_always=False)
    result = run_plan(prepared, options=options, clean_log=log)
    if args.out:
        _write_json(args.out, result.to_dict())
        log(f"Result written to {args.out}", "💾", show_always=False)
    else:
        print(json.dumps(result.to_dict(), indent=2, default=str))
    if args.svg:
        render_svg(prepared.world, [result], args.svg, roadmap=g, title=scenario.name)
        log(f"SVG written to {args.svg}", "🖼️", show_always=False)
    if not result.reachable:
        log(f"No path from {result.metadata['start']} to {result.metadata['goal']}", "⚠️")
        return EXIT_UNREACHABLE
    log(f"cost {result.cost:.6g}, length {result.length:.6g}, "
        f"risk time {result.breakdown.risk_time:.6g}", "✅")
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace, config: Dict[str, Any], log: LogFn) -> int:
    scenarios = [_load(argparse.Namespace(scenario=p, seed=args.seed)) for p in args.scenario]
    algorithms = [resolve_algorithm(a) for a in (args.algo or BENCH_ALGORITHMS)]
    reps = args.reps if args.reps is not None else int(config.get("bench_repetitions", 5))
    report = bench(scenarios, algorithms, reps, config=config, overrides=_overrides(args),
                   workers=args.workers, clean_log=log)
    print(report.to_text())
    if args.out:
        report.write_csv(args.out)
        log(f"Benchmark CSV written to {args.out}", "💾", show_always=False)
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace, config: Dict[str, Any], log: LogFn) -> int:
    scenario = _load(args)
    options = resolve_options(config, scenario.options, _overrides(args))
    prepared = scenario.prepare(options)
    cap = args.max_vertices or int(config.get("oracle_max_vertices", DEFAULT_MAX_VERTICES))
    report = cross_check(prepared.refined, prepared.xs, prepared.xg, options, cap)
    if args.out:
        _write_json(args.out, report)
    else:
        print(json.dumps(report, indent=2, default=str))
    if report["ok"]:
        log(f"All planners match the brute-force optimum {report['oracle_cost']:.6g}", "🔎")
        return EXIT_OK
    log("Planner costs disagree with the brute-force optimum", "⚠️")
    return 1


def _cmd_render(args: argparse.Namespace, config: Dict[str, Any], log: LogFn) -> int:
    scenario = _load(args)
    options = resolve_options(config, scenario.options, _overrides(args))
    prepared = scenario.prepare(options)
    results = []
    for algo in args.algo:
        algorithm = resolve_algorithm(algo)
        results.append(run_plan(prepared, algorithm, options.with_changes(algorithm=algorithm), log))
    render_svg(prepared.world, results, args.svg, roadmap=prepared.refined, title=scenario.name)
    log(f"SVG written to {args.svg}", "🖼️")
    return EXIT_OK


_COMMANDS = {
    "plan": _cmd_plan,
    "bench": _cmd_bench,
    "oracle-check": _cmd_oracle,
    "render": _cmd_render,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    config = load_config(args.config)
    configure_logging(config)
    log = clean_log_from_config(config)
    try:
        return _COMMANDS[args.command](args, config, log)
    except RiskRoadmapError as exc:
        log(f"{type(exc).__name__}: {exc}", "⚠️")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
