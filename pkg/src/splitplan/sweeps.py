"""Seeded parameter sweeps comparing LSCRA with the two even-allocation benchmarks."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .planner import benchmark_even_optimal, benchmark_even_suboptimal, solve_lscra
from .profile import LayerProfile
from .scenario import GHZ, Scenario, sample_scenario


@dataclass(frozen=True)
class SweepRow:
    x: float
    lscra_s: float
    bench_a_s: float
    bench_b_s: float


def worker_count() -> int:
    env = os.environ.get("SPLITPLAN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def compare(scenario: Scenario) -> tuple[float, float, float]:
    """(LSCRA, benchmark a, benchmark b) round latencies; b is nan when L == 2."""
    plan = solve_lscra(scenario)
    a = benchmark_even_optimal(scenario, plan).round_latency
    b = (benchmark_even_suboptimal(scenario, plan).round_latency
         if len(plan.search_table) > 1 else float("nan"))
    return plan.round_latency, a, b


def _average(scenarios):
    vals = np.array([compare(s) for s in scenarios])
    return tuple(float(v) for v in vals.mean(axis=0))


def _run(points, build, trials, seed, workers):
    def row(x):
        return SweepRow(x, *_average([build(x, seed + t) for t in range(trials)]))

    workers = workers or worker_count()
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, points))  # map keeps grid order
    return [row(x) for x in points]


def sweep_capacity(profile: LayerProfile, n_clients: int = 100, fs_min: float = 10 * GHZ,
                   fs_max: float = 50 * GHZ, steps: int = 9, seed: int = 0, trials: int = 1,
                   workers: int | None = None) -> list[SweepRow]:
    """Latency versus server capacity; the client pool is fixed per seed."""
    if steps < 1 or trials < 1:
        raise ValueError("steps and trials must be >= 1")
    grid = [float(v) for v in np.linspace(fs_min, fs_max, steps)] if steps > 1 else [float(fs_min)]
    return _run(grid, lambda fs, s: sample_scenario(n_clients, fs, profile, s),
                trials, seed, workers)


def sweep_clients(profile: LayerProfile, n_min: int = 10, n_max: int = 100, steps: int = 10,
                  fs_hz: float = 50 * GHZ, seed: int = 0, trials: int = 1,
                  workers: int | None = None) -> list[SweepRow]:
    """Latency versus client count; smaller pools are prefixes of the largest."""
    if steps < 1 or trials < 1:
        raise ValueError("steps and trials must be >= 1")
    if not 1 <= n_min <= n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    if steps == 1 or n_min == n_max:
        grid = [n_min]
    else:
        grid = sorted({int(round(v)) for v in np.linspace(n_min, n_max, steps)})
    pools = {}

    def build(n, s):
        if s not in pools:
            pools[s] = sample_scenario(n_max, fs_hz, profile, s)
        return pools[s].head(n)

    # fill the pools up front so worker threads only read them
    for t in range(trials):
        build(n_max, seed + t)
    return _run(grid, build, trials, seed, workers)


def write_sweep_csv(rows, fh, x_name: str) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([x_name, "lscra_s", "bench_a_s", "bench_b_s"])
    for r in rows:
        x = int(r.x) if x_name == "n" else r.x
        w.writerow([repr(x), repr(r.lscra_s), repr(r.bench_a_s), repr(r.bench_b_s)])
