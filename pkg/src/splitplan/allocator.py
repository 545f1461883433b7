"""Server compute allocation for a fixed cut pair.

The min-max optimum equalizes every client's round latency and spends the
whole server budget. Writing T_n = local_n + eps_n / f_n, equal latencies give

    f_n = eps_n f_k / (eps_k + f_k (local_k - local_n))

for an anchor client k. Choosing k with the largest local latency keeps every
denominator positive, and the budget equation sum_n f_n = F_s is strictly
increasing in f_k, so f_k is found by bisection on [0, F_s].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyScenario, InternalError, TooManyClientsForOracle
from .latency import CutPair, client_latencies, decompose_scenario
from .scenario import Scenario

logger = logging.getLogger(__name__)

BISECTION_RTOL = 1e-9
BISECTION_MAX_ITER = 200
ORACLE_MAX_CLIENTS = 4


@dataclass(frozen=True)
class Allocation:
    shares: tuple[float, ...]
    client_latencies: tuple[float, ...]
    round_latency: float
    anchor_index: int | None = None
    iterations: int = 0


def _make_allocation(scenario, cuts, shares, anchor=None, iterations=0) -> Allocation:
    shares = tuple(float(s) for s in shares)
    lat = tuple(client_latencies(scenario, cuts, shares))
    return Allocation(shares, lat, max(lat), anchor, iterations)


def balance_residual(f_sk: float, eps: Sequence[float], t_local: Sequence[float], k: int,
                     F_s: float) -> float:
    """Total server demand implied by anchor share ``f_sk``, minus ``F_s``.

    Requires ``t_local[k]`` to be the largest local latency.
    """
    eps_k, tl_k = eps[k], t_local[k]
    total = 0.0
    for e, tl in zip(eps, t_local):
        total += e * f_sk / (eps_k + f_sk * (tl_k - tl))
    return total - F_s


def equal_latency_shares(f_sk, eps, t_local, k) -> list[float]:
    eps_k, tl_k = eps[k], t_local[k]
    return [e * f_sk / (eps_k + f_sk * (tl_k - tl)) for e, tl in zip(eps, t_local)]


def solve_anchor_share(eps, t_local, k, F_s, rtol=BISECTION_RTOL,
                       max_iter=BISECTION_MAX_ITER) -> tuple[float, int]:
    """Bisect the budget equation for the anchor share. Returns (root, iterations)."""
    lo, hi = 0.0, float(F_s)
    tol = rtol * F_s
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        r = balance_residual(mid, eps, t_local, k, F_s)
        if abs(r) <= tol:
            return mid, it
        if r < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            return 0.5 * (lo + hi), it
    raise InternalError(f"bisection did not converge in {max_iter} iterations")


def allocate_optimal(scenario: Scenario, cuts: CutPair) -> Allocation:
    """Exact min-max allocation of the server budget for fixed cuts."""
    if scenario.n_clients < 1:
        raise EmptyScenario("scenario has no clients")
    decomp = decompose_scenario(scenario, cuts)
    eps = [d.epsilon for d in decomp]
    t_local = [d.local_latency for d in decomp]
    F_s = scenario.server.capacity_hz

    active = [i for i, e in enumerate(eps) if e > 0]
    if not active:
        # Empty body: the server does no work and shares are irrelevant.
        return _make_allocation(scenario, cuts, [0.0] * len(eps))
    if len(active) < len(eps):
        logger.debug("clients %s have no server work; excluded from allocation",
                     [i for i in range(len(eps)) if eps[i] == 0])
    a_eps = [eps[i] for i in active]
    a_tl = [t_local[i] for i in active]
    # argmax of local latency, lowest index on ties
    k = max(range(len(a_tl)), key=lambda i: (a_tl[i], -i))
    root, iters = solve_anchor_share(a_eps, a_tl, k, F_s)
    a_shares = equal_latency_shares(root, a_eps, a_tl, k)
    # Spend exactly F_s; the correction is within the bisection tolerance.
    scale = F_s / sum(a_shares)
    shares = [0.0] * len(eps)
    for i, s in zip(active, a_shares):
        shares[i] = s * scale
    return _make_allocation(scenario, cuts, shares, anchor=active[k], iterations=iters)


def allocate_even(scenario: Scenario, cuts: CutPair) -> Allocation:
    if scenario.n_clients < 1:
        raise EmptyScenario("scenario has no clients")
    n = scenario.n_clients
    return _make_allocation(scenario, cuts, [scenario.server.capacity_hz / n] * n)


# --- brute-force oracle -------------------------------------------------------

def _latency_table(d, shares):
    """Latency of one client at each candidate share; inf where the share is infeasible."""
    shares = np.asarray(shares, dtype=float)
    out = np.full(shares.shape, np.inf)
    ok = shares >= 0
    if d.epsilon == 0:
        out[ok] = d.local_latency
    else:
        pos = shares > 0
        out[pos] = d.local_latency + d.epsilon / shares[pos]
    return out


def _grid_minmax(tables, total):
    """Exhaustive min over integer vectors m with sum(m) == total of max_n tables[n][m_n].

    Solved exactly by dynamic programming over clients. Returns (value, m).
    """
    n_clients = len(tables)
    first = tables[0]
    g = np.full(total + 1, np.inf)
    upto = min(total, len(first) - 1)
    g[: upto + 1] = first[: upto + 1]
    choices = []
    for n in range(1, n_clients):
        t = tables[n]
        last = n == n_clients - 1
        budgets = [total] if last else range(total + 1)
        new_g = np.full(total + 1, np.inf)
        arg = np.zeros(total + 1, dtype=np.int64)
        for B in budgets:
            hi = min(B, len(t) - 1)
            # i units to client n, B - i to the earlier clients
            cand = np.maximum(t[: hi + 1], g[B - hi: B + 1][::-1])
            j = int(np.argmin(cand))
            new_g[B] = cand[j]
            arg[B] = j
        choices.append(arg)
        g = new_g
    m = [0] * n_clients
    B = total
    for n in range(n_clients - 1, 0, -1):
        m[n] = int(choices[n - 1][B])
        B -= m[n]
    m[0] = B
    return float(g[total]), m


def oracle_grid_allocate(scenario: Scenario, cuts: CutPair, resolution: int = 10_000,
                         refine: bool = True) -> Allocation:
    """Brute-force min-max allocation on the simplex grid sum(f) = F_s.

    Searches every grid point with spacing F_s / resolution, then (if
    ``refine``) repeatedly grid-searches a small window around the incumbent,
    shrinking it by 10x once the incumbent stops moving. Meant as a test
    oracle for small N.
    """
    n = scenario.n_clients
    if n < 1:
        raise EmptyScenario("scenario has no clients")
    if n > ORACLE_MAX_CLIENTS:
        raise TooManyClientsForOracle(f"oracle supports at most {ORACLE_MAX_CLIENTS} clients, got {n}")
    if resolution < 100:
        raise ValueError("resolution must be >= 100")
    decomp = decompose_scenario(scenario, cuts)
    F_s = scenario.server.capacity_hz

    h = F_s / resolution
    units = np.arange(resolution + 1) * h
    tables = [_latency_table(d, units) for d in decomp]
    best, m = _grid_minmax(tables, resolution)
    shares = np.array(m, dtype=float) * h

    if refine and n > 1:
        # Local grids of 2 * half + 1 points per client around the incumbent.
        # Re-centre while the best point sits on the window edge, else zoom in.
        half = 20
        step = h
        for _ in range(1000):
            offsets = (np.arange(2 * half + 1) - half) * step
            tables = [_latency_table(d, shares[i] + offsets) for i, d in enumerate(decomp)]
            val, mm = _grid_minmax(tables, n * half)
            moved = np.array(mm) - half
            if val < best:
                best = val
                shares = shares + moved * step
                if np.abs(moved).max() == half:
                    continue
            step /= 10
            if step <= 1e-13 * F_s:
                break
        shares = np.maximum(shares, 0.0)
    return _make_allocation(scenario, cuts, list(shares))
