"""Joint cut-pair and server-allocation search (LSCRA) plus the even-allocation benchmarks."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import allocator
from .allocator import Allocation
from .errors import InvalidPlan, NoSecondCandidate, ParseError
from .latency import CutPair
from .profile import _read_json
from .scenario import Scenario


@dataclass(frozen=True)
class PlanResult:
    best_cuts: CutPair
    allocation: Allocation
    round_latency: float
    # (cuts, latency under optimal allocation), ascending by latency then cuts
    search_table: tuple[tuple[CutPair, float], ...]
    method: str = "lscra"

    def to_dict(self) -> dict:
        a = self.allocation
        return {
            "method": self.method,
            "best_cuts": list(self.best_cuts.as_tuple()),
            "round_latency_s": self.round_latency,
            "shares_hz": list(a.shares),
            "client_latencies_s": list(a.client_latencies),
            "anchor_index": a.anchor_index,
            "search_table": [
                {"cuts": list(c.as_tuple()), "round_latency_s": t} for c, t in self.search_table
            ],
        }


def enumerate_cuts(L: int) -> list[CutPair]:
    """All (a, b) with 1 <= a <= b <= L-1, lexicographic."""
    if L < 2:
        raise ValueError(f"need L >= 2, got {L}")
    return [CutPair(a, b) for a in range(1, L) for b in range(a, L)]


def _rank_key(item):
    cuts, latency = item[0], item[1]
    return (latency, cuts.first_cut, cuts.second_cut)


def solve_lscra(scenario: Scenario, workers: int = 1) -> PlanResult:
    """Evaluate every cut pair under its optimal allocation and keep the fastest.

    Ties go to the lexicographically smallest cut pair. ``workers > 1``
    evaluates candidates on a thread pool; the result does not depend on it.
    """
    candidates = enumerate_cuts(scenario.profile.layer_count)

    def evaluate(cuts):
        return cuts, allocator.allocate_optimal(scenario, cuts)

    if workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, candidates))
    else:
        results = [evaluate(c) for c in candidates]

    ranked = sorted(((c, a.round_latency, a) for c, a in results), key=_rank_key)
    best_cuts, best_latency, best_alloc = ranked[0]
    return PlanResult(best_cuts, best_alloc, best_latency,
                      tuple((c, t) for c, t, _ in ranked))


def _even_plan(scenario, cuts, search_table, method):
    alloc = allocator.allocate_even(scenario, cuts)
    return PlanResult(cuts, alloc, alloc.round_latency, search_table, method)


def benchmark_even_optimal(scenario: Scenario, plan: PlanResult | None = None) -> PlanResult:
    """Optimal cuts, server budget split evenly."""
    plan = plan or solve_lscra(scenario)
    return _even_plan(scenario, plan.best_cuts, plan.search_table, "even_optimal_cuts")


def benchmark_even_suboptimal(scenario: Scenario, plan: PlanResult | None = None) -> PlanResult:
    """Second-best cuts (ranked under optimal allocation), server budget split evenly."""
    plan = plan or solve_lscra(scenario)
    if len(plan.search_table) < 2:
        raise NoSecondCandidate("only one feasible cut pair; no second-best candidate")
    return _even_plan(scenario, plan.search_table[1][0], plan.search_table, "even_second_cuts")


def save_plan(plan: PlanResult, path) -> None:
    Path(path).write_text(json.dumps(plan.to_dict(), indent=2) + "\n")


def plan_from_dict(data, scenario: Scenario, path=None) -> PlanResult:
    """Rebuild a plan for ``scenario`` from a plan document.

    Only ``best_cuts`` and ``shares_hz`` are trusted; latencies are recomputed.
    """
    if not isinstance(data, dict):
        raise ParseError("plan must be a JSON object", path=path)
    cuts = data.get("best_cuts")
    if (not isinstance(cuts, list) or len(cuts) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in cuts)):
        raise ParseError("expected [first_cut, second_cut] integers", field="best_cuts", path=path)
    shares = data.get("shares_hz")
    if (not isinstance(shares, list)
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in shares)):
        raise ParseError("expected an array of numbers", field="shares_hz", path=path)
    cut_pair = CutPair(*cuts).validate(scenario.profile.layer_count)
    if len(shares) != scenario.n_clients:
        raise InvalidPlan(f"plan has {len(shares)} shares for {scenario.n_clients} clients")
    if any(not math.isfinite(s) or s < 0 for s in shares):
        raise InvalidPlan("shares must be finite and >= 0")
    if sum(shares) > scenario.server.capacity_hz * (1 + 1e-9):
        raise InvalidPlan("shares exceed the server capacity")
    alloc = allocator._make_allocation(scenario, cut_pair, shares)
    return PlanResult(cut_pair, alloc, alloc.round_latency, (), str(data.get("method", "file")))


def load_plan(path, scenario: Scenario) -> PlanResult:
    return plan_from_dict(_read_json(path), scenario, path=Path(path))
