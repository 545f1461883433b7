import json

import numpy as np
import pytest

from splitplan.errors import InvariantViolation, ParseError
from splitplan.profile import save_profile
from splitplan.scenario import (
    BATCH_SIZE, CLIENT_INTENSITY, SERVER_INTENSITY, ClientConfig, load_scenario,
    sample_clients, sample_scenario, save_scenario,
)


def test_sample_bounds_and_constants(toy):
    s = sample_scenario(5, 50e9, toy, 42)
    assert s.n_clients == 5
    assert s.server.capacity_hz == 50e9
    assert s.server.compute_intensity == 1 / 32
    for c in s.clients:
        assert 0.5e9 <= c.compute_hz <= 1.5e9
        assert 5e6 <= c.uplink_bps <= 30e6
        assert 2 * c.uplink_bps <= c.downlink_bps <= 10 * c.uplink_bps
        assert c.batch_size == 64
        assert c.compute_intensity == 1 / 16


def test_sample_deterministic(toy):
    assert sample_scenario(5, 50e9, toy, 42) == sample_scenario(5, 50e9, toy, 42)
    assert sample_scenario(5, 50e9, toy, 42) != sample_scenario(5, 50e9, toy, 43)


def test_single_client(toy):
    s = sample_scenario(1, 10e9, toy, 0)
    assert s.n_clients == 1


def test_prefix_property():
    assert sample_clients(100, 7)[:10] == sample_clients(10, 7)


def test_bounds_over_many_draws():
    clients = sample_clients(20_000, 2024)
    f = np.array([c.compute_hz for c in clients])
    up = np.array([c.uplink_bps for c in clients])
    mult = np.array([c.downlink_bps / c.uplink_bps for c in clients])
    assert len(clients) == 20_000
    assert f.min() >= 0.5e9 and f.max() <= 1.5e9
    assert up.min() >= 5e6 and up.max() <= 30e6
    assert mult.min() >= 2 - 1e-12 and mult.max() <= 10 + 1e-12
    # roughly uniform: means near interval midpoints
    assert abs(f.mean() - 1e9) < 0.01e9
    assert abs(mult.mean() - 6) < 0.05
    assert {c.batch_size for c in clients} == {BATCH_SIZE}
    assert {c.compute_intensity for c in clients} == {CLIENT_INTENSITY}
    assert SERVER_INTENSITY == 1 / 32


def test_round_trip_bit_exact(tmp_path, toy):
    s = sample_scenario(7, 33.3e9, toy, 5)
    save_scenario(s, tmp_path / "s.json")
    assert load_scenario(tmp_path / "s.json") == s


def test_profile_path_reference(tmp_path, toy):
    save_profile(toy, tmp_path / "prof.json")
    doc = sample_scenario(2, 1e9, toy, 1).to_dict()
    del doc["profile"]
    doc["profile_path"] = "prof.json"
    (tmp_path / "s.json").write_text(json.dumps(doc))
    assert load_scenario(tmp_path / "s.json").profile == toy


def test_profile_override(tmp_path, toy, rng):
    from conftest import random_profile
    other = random_profile(rng, 6)
    save_scenario(sample_scenario(2, 1e9, toy, 1), tmp_path / "s.json")
    assert load_scenario(tmp_path / "s.json", profile=other).profile == other


def _doc(toy):
    return sample_scenario(2, 1e9, toy, 1).to_dict()


def test_zero_clients_rejected(tmp_path, toy):
    doc = _doc(toy)
    doc["clients"] = []
    (tmp_path / "s.json").write_text(json.dumps(doc))
    with pytest.raises(InvariantViolation):
        load_scenario(tmp_path / "s.json")


def test_negative_uplink_rejected(tmp_path, toy):
    doc = _doc(toy)
    doc["clients"][1]["uplink_bps"] = -5.0
    (tmp_path / "s.json").write_text(json.dumps(doc))
    with pytest.raises(InvariantViolation, match="uplink_bps"):
        load_scenario(tmp_path / "s.json")


def test_missing_field_named(tmp_path, toy):
    doc = _doc(toy)
    del doc["server"]["k_s"]
    (tmp_path / "s.json").write_text(json.dumps(doc))
    with pytest.raises(ParseError) as info:
        load_scenario(tmp_path / "s.json")
    assert info.value.field == "server.k_s"


def test_client_validation():
    with pytest.raises(InvariantViolation):
        ClientConfig(compute_hz=0, batch_size=1, uplink_bps=1, downlink_bps=1)
    # downlink slower than uplink is allowed
    ClientConfig(compute_hz=1, batch_size=1, uplink_bps=10, downlink_bps=1)
