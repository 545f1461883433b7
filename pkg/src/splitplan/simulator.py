"""Discrete-event simulation of one U-shaped parallel split learning round.

Each client walks through nine phases (compute or transfer) strictly in order.
The server is partitioned: client n's body FP/BP runs at its fixed share
f_{s,n} regardless of what other clients do, so server phases of different
clients overlap freely. After the last body BP the server applies the
averaged body gradients, modelled as a zero-duration event.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass, field

from .errors import LengthMismatch, ZeroShareWithNonzeroBody
from .latency import CutPair, split_workloads
from .scenario import Scenario

# (step, phase, where)
PHASES = (
    (1, "compute", "client"),
    (1, "uplink", "link"),
    (2, "compute", "server"),
    (2, "downlink", "link"),
    (3, "compute", "client"),
    (3, "uplink", "link"),
    (4, "compute", "server"),
    (4, "downlink", "link"),
    (5, "compute", "client"),
)
AGGREGATE_PHASE = "body-gradient-average"


@dataclass(frozen=True)
class TraceEvent:
    client: int
    step: int
    phase: str
    where: str
    start_s: float
    end_s: float
    server_share: float = 0.0

    @property
    def duration(self) -> float:
        return self.end_s - self.start_s


@dataclass
class EventTrace:
    per_client: list[list[TraceEvent]]
    aggregate_time_s: float
    round_makespan: float
    start_s: float = 0.0
    durations: list[list[float]] = field(default_factory=list)

    def events(self):
        """All client events in (start, client, step) order."""
        evs = [e for lst in self.per_client for e in lst]
        evs.sort(key=lambda e: (e.start_s, e.client, e.step))
        return evs

    def client_total(self, n: int) -> float:
        """Sum of client n's phase durations (independent of timestamps)."""
        return sum(self.durations[n])

    def max_server_load(self) -> float:
        """Peak total server share in use by concurrently running server phases."""
        edges = []
        for e in self.events():
            if e.where == "server" and e.end_s > e.start_s:
                edges.append((e.start_s, 1, e.server_share))
                edges.append((e.end_s, 0, -e.server_share))
        edges.sort()  # releases (0) before acquisitions (1) at equal times
        load = peak = 0.0
        for _, _, delta in edges:
            load += delta
            peak = max(peak, load)
        return peak

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["client", "step", "phase", "start_s", "end_s"])
        for e in self.events():
            w.writerow([e.client, e.step, e.phase, repr(e.start_s), repr(e.end_s)])
        w.writerow(["server", 4, AGGREGATE_PHASE, repr(self.aggregate_time_s),
                    repr(self.aggregate_time_s)])


def _phase_durations(w, c, k_s, share):
    beta = c.batch_size
    client_rate = c.compute_hz / c.compute_intensity  # FLOP/s

    def server(work):
        if work == 0:
            return 0.0
        if share <= 0:
            raise ZeroShareWithNonzeroBody(f"server share {share!r} with nonzero body workload")
        return beta * work / (share / k_s)

    return [
        beta * w.head_fp / client_rate,
        beta * w.act1_bits / c.uplink_bps,
        server(w.body_fp),
        beta * w.act2_bits / c.downlink_bps,
        beta * (w.tail_fp + w.tail_bp) / client_rate,
        beta * w.act2_bits / c.uplink_bps,
        server(w.body_bp),
        beta * w.act1_bits / c.downlink_bps,
        beta * w.head_bp / client_rate,
    ]


def simulate_round(scenario: Scenario, cuts: CutPair, allocation, start_s: float = 0.0) -> EventTrace:
    """Run one round; ``allocation`` is an Allocation or a sequence of shares."""
    shares = list(getattr(allocation, "shares", allocation))
    if len(shares) != scenario.n_clients:
        raise LengthMismatch(f"{len(shares)} shares for {scenario.n_clients} clients")
    w = split_workloads(scenario.profile, cuts)
    k_s = scenario.server.compute_intensity
    durations = [_phase_durations(w, c, k_s, f) for c, f in zip(scenario.clients, shares)]

    per_client: list[list[TraceEvent]] = [[] for _ in shares]
    # ready queue of (time, client, phase index); ties resolve by client then step
    queue = [(start_s, n, 0) for n in range(len(shares))]
    heapq.heapify(queue)
    body_bp_done = start_s
    while queue:
        t, n, i = heapq.heappop(queue)
        step, phase, where = PHASES[i]
        end = t + durations[n][i]
        per_client[n].append(TraceEvent(n, step, phase, where, t, end,
                                        shares[n] if where == "server" else 0.0))
        if step == 4 and where == "server":
            body_bp_done = max(body_bp_done, end)
        if i + 1 < len(PHASES):
            heapq.heappush(queue, (end, n, i + 1))

    makespan_end = max(lst[-1].end_s for lst in per_client)
    return EventTrace(per_client, body_bp_done, makespan_end - start_s, start_s, durations)


def simulate_training(scenario: Scenario, plan, rounds: int) -> list[float]:
    """Per-round makespans for ``rounds`` back-to-back rounds of ``plan``.

    Rounds are separated by the body update, so each is simulated from a
    fresh clock; cumulative time is the sum of the returned values.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    return [simulate_round(scenario, plan.best_cuts, plan.allocation).round_makespan
            for _ in range(rounds)]
