"""Benchmark harness: repeated planner runs per scenario, mean and spread of wall time.

World, roadmap and refinement are built once per scenario and excluded from
timing; each planner's own clock covers only the search (and, for the
precompute planner, its border table and augmented graph).
"""
from __future__ import annotations

import csv
import queue
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .config import PlannerOptions, resolve_options
from .errors import OutputWriteError, ResourceAbort, UnsupportedQuery
from .log_utils import LogFn, null_log
from .planner import run_algorithm
from .scenario import PreparedScenario, Scenario

BENCH_ALGORITHMS = ("dijkstra", "incremental", "astar", "precompute")
CSV_FIELDS = [
    "scenario", "algorithm", "status", "repetitions", "mean_s", "std_s", "cost",
    "expansions", "apsp_share", "table_bytes", "note",
]


@dataclass
class BenchRow:
    scenario: str
    algorithm: str
    status: str = "ok"
    repetitions: int = 0
    mean_s: Optional[float] = None
    std_s: Optional[float] = None
    cost: Optional[float] = None
    expansions: Optional[int] = None
    apsp_share: Optional[float] = None
    table_bytes: Optional[int] = None
    note: str = ""


@dataclass
class BenchReport:
    rows: List[BenchRow] = field(default_factory=list)

    def row(self, scenario: str, algorithm: str) -> Optional[BenchRow]:
        for r in self.rows:
            if r.scenario == scenario and r.algorithm == algorithm:
                return r
        return None

    def ratio(self, scenario: str, numerator: str, denominator: str) -> Optional[float]:
        top, bottom = self.row(scenario, numerator), self.row(scenario, denominator)
        if not top or not bottom or top.mean_s is None or not bottom.mean_s:
            return None
        return top.mean_s / bottom.mean_s

    def ratios(self) -> Dict[str, Dict[str, Optional[float]]]:
        out: Dict[str, Dict[str, Optional[float]]] = {}
        for name in dict.fromkeys(r.scenario for r in self.rows):
            out[name] = {
                "incremental/dijkstra": self.ratio(name, "incremental", "dijkstra"),
                "precompute/incremental": self.ratio(name, "precompute", "incremental"),
            }
        return out

    def write_csv(self, path: Path) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
                writer.writeheader()
                for r in self.rows:
                    writer.writerow({k: ("" if v is None else v) for k, v in asdict(r).items()})
        except OSError as exc:
            raise OutputWriteError(str(path), exc.strerror or str(exc)) from exc
        return path

    def to_text(self) -> str:
        header = f"{'scenario':<22} {'algorithm':<12} {'time (s)':>22} {'cost':>12} {'expansions':>11}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            if r.status != "ok":
                timing = "---" if r.status == "DNF" else r.status
            else:
                timing = f"{r.mean_s:.4f} ± {r.std_s:.4f}"
            cost = "" if r.cost is None else f"{r.cost:.6g}"
            expansions = "" if r.expansions is None else str(r.expansions)
            lines.append(f"{r.scenario:<22} {r.algorithm:<12} {timing:>22} {cost:>12} {expansions:>11}")
            if r.apsp_share is not None:
                lines.append(f"{'':<22} {'':<12} APSP share {r.apsp_share:.1%}, "
                             f"table {(r.table_bytes or 0) / 1e6:.1f} MB")
        for name, ratios in self.ratios().items():
            parts = [f"{k} = {v:.2f}" for k, v in ratios.items() if v is not None]
            if parts:
                lines.append(f"{name}: " + ", ".join(parts))
        return "\n".join(lines)


def bench_prepared(
    prepared: PreparedScenario,
    algorithms: Sequence[str] = BENCH_ALGORITHMS,
    repetitions: int = 5,
    options: Optional[PlannerOptions] = None,
    clean_log: Optional[LogFn] = None,
) -> List[BenchRow]:
    log = clean_log or null_log
    options = options or prepared.options
    name = prepared.scenario.name
    rows: List[BenchRow] = []
    for algorithm in algorithms:
        row = BenchRow(name, algorithm)
        times: List[float] = []
        try:
            for _ in range(max(1, repetitions)):
                result = run_algorithm(algorithm, prepared.refined, prepared.xs, prepared.xg,
                                       options.with_changes(algorithm=algorithm, trace=False))
                times.append(result.stats.wall_time)
        except ResourceAbort as exc:
            row.status, row.note = "DNF", str(exc)
            log(f"{name}/{algorithm}: did not finish ({exc})", "⚠️")
        except UnsupportedQuery as exc:
            row.status, row.note = "n/a", str(exc)
        else:
            arr = np.asarray(times)
            row.repetitions = len(times)
            row.mean_s = float(arr.mean())
            row.std_s = float(arr.std(ddof=0))
            row.cost = result.cost if result.reachable else None
            row.expansions = result.stats.expansions
            if algorithm == "precompute":
                row.apsp_share = result.metadata.get("apsp_share")
                row.table_bytes = result.metadata.get("table_bytes")
            log(f"{name}/{algorithm}: {row.mean_s:.4f}s ± {row.std_s:.4f}", "📊", show_always=False)
        rows.append(row)
    return rows


def bench(
    scenarios: Sequence[Scenario],
    algorithms: Sequence[str] = BENCH_ALGORITHMS,
    repetitions: int = 5,
    *,
    config: Optional[Dict[str, Any]] = None,
    overrides: Optional[Dict[str, Any]] = None,
    workers: int = 1,
    clean_log: Optional[LogFn] = None,
) -> BenchReport:
    """Benchmark every scenario; ``workers > 1`` runs scenarios concurrently."""
    log = clean_log or null_log
    results: Dict[int, List[BenchRow]] = {}
    lock = threading.Lock()

    def run_one(index: int, scenario: Scenario) -> None:
        options = resolve_options(config, scenario.options, overrides)
        prepared = scenario.prepare(options)
        log(f"{scenario.name}: {len(prepared.refined)} vertices, {prepared.refined.n_border} border "
            f"(built in {prepared.build_seconds:.2f}s)", "🚀", show_always=False)
        rows = bench_prepared(prepared, algorithms, repetitions, options, log)
        with lock:
            results[index] = rows

    if workers <= 1 or len(scenarios) < 2:
        for i, scenario in enumerate(scenarios):
            run_one(i, scenario)
    else:
        tasks: "queue.Queue[int]" = queue.Queue()
        for i in range(len(scenarios)):
            tasks.put(i)
        errors: List[BaseException] = []

        def _bench_worker() -> None:
            while True:
                try:
                    i = tasks.get_nowait()
                except queue.Empty:
                    return
                try:
                    run_one(i, scenarios[i])
                except BaseException as exc:  # surfaced after join
                    with lock:
                        errors.append(exc)
                finally:
                    tasks.task_done()

        pool = [threading.Thread(target=_bench_worker, daemon=True, name=f"BenchWorker-{k + 1}")
                for k in range(min(workers, len(scenarios)))]
        for worker in pool:
            worker.start()
        for worker in pool:
            worker.join()
        if errors:
            raise errors[0]

    report = BenchReport()
    for i in sorted(results):
        report.rows.extend(results[i])
    return report


__all__ = ["BENCH_ALGORITHMS", "BenchRow", "BenchReport", "bench_prepared", "bench"]
