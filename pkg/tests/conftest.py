import numpy as np
import pytest

from splitplan.latency import CutPair
from splitplan.profile import build_profile, toy_profile
from splitplan.scenario import ClientConfig, Scenario, ServerConfig


@pytest.fixture
def toy():
    return toy_profile()


@pytest.fixture
def toy_client():
    # beta=1, K_c=1, f_n=100, R_up=R_down=8000
    return ClientConfig(compute_hz=100, batch_size=1, uplink_bps=8000, downlink_bps=8000,
                        compute_intensity=1.0)


@pytest.fixture
def toy_scenario(toy, toy_client):
    return Scenario(ServerConfig(capacity_hz=500, compute_intensity=1.0), (toy_client,), toy)


def random_client(rng):
    return ClientConfig(
        compute_hz=float(rng.uniform(50, 150)),
        batch_size=int(rng.integers(1, 5)),
        uplink_bps=float(rng.uniform(2000, 20000)),
        downlink_bps=float(rng.uniform(2000, 40000)),
        compute_intensity=float(rng.uniform(0.5, 2.0)),
    )


def random_scenario(rng, n_clients, profile=None, capacity=None):
    """Heterogeneous scenario on the toy scale (FLOPs ~1e2-1e3, rates ~1e4 bit/s)."""
    profile = profile or toy_profile()
    if capacity is None:
        capacity = float(10 ** rng.uniform(2, 5))
    server = ServerConfig(capacity_hz=capacity, compute_intensity=float(rng.uniform(0.5, 2.0)))
    return Scenario(server, tuple(random_client(rng) for _ in range(n_clients)), profile)


def random_body_cuts(rng, layer_count):
    """A cut pair with a non-empty body (a < b)."""
    a = int(rng.integers(1, layer_count - 1))
    b = int(rng.integers(a + 1, layer_count))
    return CutPair(a, b)


def random_profile(rng, layer_count, integer=True):
    if integer:
        fp = rng.integers(1, 10_000, layer_count)
        bp = rng.integers(1, 20_000, layer_count)
    else:
        fp = rng.uniform(1e-3, 1e9, layer_count)
        bp = rng.uniform(1e-3, 1e9, layer_count)
    act = rng.integers(1, 100_000, layer_count)
    return build_profile(fp.tolist(), bp.tolist(), act.tolist())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
