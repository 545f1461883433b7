"""Analytic per-round latency of U-shaped parallel split learning.

A round for client n has five sequential steps:

1. head FP on the client, upload of the first-cut activations
2. body FP on the server (at share f_{s,n}), download of second-cut activations
3. tail FP+BP on the client, upload of second-cut gradients
4. body BP on the server, download of first-cut gradients
5. head BP on the client

Every term scales with the batch size. Step 5 runs on the client and is
divided by the client frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import CutOutOfRange, LengthMismatch, ZeroShareWithNonzeroBody
from .profile import LayerProfile
from .scenario import ClientConfig, Scenario


@dataclass(frozen=True, order=True)
class CutPair:
    """First and second cut, 1-based layer numbers with 1 <= a <= b <= L-1.

    The head is layers 1..a, the body a+1..b (empty when a == b) and the tail
    b+1..L, so the output layer always stays on the client.
    """

    first_cut: int
    second_cut: int

    def validate(self, layer_count: int) -> "CutPair":
        a, b = self.first_cut, self.second_cut
        if not (1 <= a <= b <= layer_count - 1):
            raise CutOutOfRange(
                f"cuts ({a}, {b}) invalid for L={layer_count}: need 1 <= a <= b <= L-1")
        return self

    def as_tuple(self) -> tuple[int, int]:
        return (self.first_cut, self.second_cut)

    def __str__(self):
        return f"({self.first_cut},{self.second_cut})"


@dataclass(frozen=True)
class SplitWorkloads:
    """Per-sample FLOPs of each sub-model and activation bits at both cuts."""

    head_fp: float
    head_bp: float
    body_fp: float
    body_bp: float
    tail_fp: float
    tail_bp: float
    act1_bits: float
    act2_bits: float

    @property
    def has_body(self) -> bool:
        return self.body_fp > 0 or self.body_bp > 0


@dataclass(frozen=True)
class StepLatencies:
    t1: float
    t2: float
    t3: float
    t4: float
    t5: float

    def as_tuple(self):
        return (self.t1, self.t2, self.t3, self.t4, self.t5)


@dataclass(frozen=True)
class ClientDecomposition:
    """T_n = local_latency + epsilon / f_share."""

    epsilon: float  # server cycles per round
    local_latency: float  # seconds

    def round_latency(self, f_share: float) -> float:
        if self.epsilon == 0:
            return self.local_latency
        return self.local_latency + self.epsilon / f_share


def split_workloads(profile: LayerProfile, cuts: CutPair) -> SplitWorkloads:
    a, b = cuts.validate(profile.layer_count).as_tuple()
    rho, omega, psi = profile.fp_cumulative, profile.bp_cumulative, profile.activation_bits
    # Body work as a sum of marginals: exactly 0 when a == b, no cancellation.
    body_fp = sum(profile.fp_flops[a:b])
    body_bp = sum(profile.bp_flops[a:b])
    return SplitWorkloads(
        head_fp=rho[a - 1],
        head_bp=omega[a - 1],
        body_fp=body_fp,
        body_bp=body_bp,
        tail_fp=sum(profile.fp_flops[b:]),
        tail_bp=sum(profile.bp_flops[b:]),
        act1_bits=psi[a - 1],
        act2_bits=psi[b - 1],
    )


def _server_time(work, k_s, beta, f_share):
    if work == 0:
        return 0.0
    if f_share <= 0:
        raise ZeroShareWithNonzeroBody(
            f"server share {f_share!r} with nonzero body workload {work!r}")
    return beta * work * k_s / f_share


def client_step_latencies(w: SplitWorkloads, c: ClientConfig, k_s: float,
                          f_share: float) -> StepLatencies:
    beta, k_c, f = c.batch_size, c.compute_intensity, c.compute_hz
    up, down = c.uplink_bps, c.downlink_bps
    return StepLatencies(
        t1=beta * w.head_fp * k_c / f + beta * w.act1_bits / up,
        t2=_server_time(w.body_fp, k_s, beta, f_share) + beta * w.act2_bits / down,
        t3=beta * (w.tail_fp + w.tail_bp) * k_c / f + beta * w.act2_bits / up,
        t4=_server_time(w.body_bp, k_s, beta, f_share) + beta * w.act1_bits / down,
        t5=beta * w.head_bp * k_c / f,
    )


def client_round_latency(steps: StepLatencies) -> float:
    return steps.t1 + steps.t2 + steps.t3 + steps.t4 + steps.t5


def decompose(w: SplitWorkloads, c: ClientConfig, k_s: float) -> ClientDecomposition:
    beta, k_c, f = c.batch_size, c.compute_intensity, c.compute_hz
    compute = beta * k_c * (w.head_fp + w.tail_fp + w.tail_bp + w.head_bp) / f
    comm = (beta * w.act1_bits / c.uplink_bps + beta * w.act2_bits / c.downlink_bps
            + beta * w.act2_bits / c.uplink_bps + beta * w.act1_bits / c.downlink_bps)
    return ClientDecomposition(epsilon=beta * k_s * (w.body_fp + w.body_bp),
                               local_latency=compute + comm)


def decompose_scenario(scenario: Scenario, cuts: CutPair) -> list[ClientDecomposition]:
    w = split_workloads(scenario.profile, cuts)
    k_s = scenario.server.compute_intensity
    return [decompose(w, c, k_s) for c in scenario.clients]


def client_latencies(scenario: Scenario, cuts: CutPair, shares: Sequence[float]) -> list[float]:
    if len(shares) != scenario.n_clients:
        raise LengthMismatch(f"{len(shares)} shares for {scenario.n_clients} clients")
    w = split_workloads(scenario.profile, cuts)
    k_s = scenario.server.compute_intensity
    return [client_round_latency(client_step_latencies(w, c, k_s, f))
            for c, f in zip(scenario.clients, shares)]


def round_latency(scenario: Scenario, cuts: CutPair, allocation) -> float:
    """Round makespan: the slowest client's latency.

    ``allocation`` is an :class:`~splitplan.allocator.Allocation` or a plain
    sequence of per-client server shares.
    """
    shares = getattr(allocation, "shares", allocation)
    return max(client_latencies(scenario, cuts, shares))
