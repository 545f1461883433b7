"""Server/client configurations, seeded scenario sampling and scenario files.

Units are SI decimal: 1 GHz = 1e9 cycles/s, 1 Mbps = 1e6 bit/s.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvariantViolation, ParseError
from .profile import LayerProfile, _read_json, load_profile, profile_from_dict

GHZ = 1e9
MBPS = 1e6

# Parameter settings used for randomized scenarios.
CLIENT_HZ_RANGE = (0.5 * GHZ, 1.5 * GHZ)
UPLINK_BPS_RANGE = (5 * MBPS, 30 * MBPS)
DOWNLINK_MULTIPLIER_RANGE = (2.0, 10.0)
BATCH_SIZE = 64
SERVER_INTENSITY = 1 / 32  # cycles/FLOP
CLIENT_INTENSITY = 1 / 16  # cycles/FLOP


@dataclass(frozen=True)
class ClientConfig:
    compute_hz: float
    batch_size: int
    uplink_bps: float
    downlink_bps: float
    compute_intensity: float = CLIENT_INTENSITY

    def __post_init__(self):
        for name in ("compute_hz", "batch_size", "uplink_bps", "downlink_bps",
                     "compute_intensity"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvariantViolation(f"client {name} > 0", f"got {v!r}")


@dataclass(frozen=True)
class ServerConfig:
    capacity_hz: float
    compute_intensity: float = SERVER_INTENSITY

    def __post_init__(self):
        for name in ("capacity_hz", "compute_intensity"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvariantViolation(f"server {name} > 0", f"got {v!r}")


@dataclass(frozen=True)
class Scenario:
    server: ServerConfig
    clients: tuple[ClientConfig, ...]
    profile: LayerProfile

    def __post_init__(self):
        object.__setattr__(self, "clients", tuple(self.clients))
        if len(self.clients) < 1:
            raise InvariantViolation("scenario has at least one client")

    @property
    def n_clients(self) -> int:
        return len(self.clients)

    def with_capacity(self, capacity_hz: float) -> "Scenario":
        server = ServerConfig(capacity_hz, self.server.compute_intensity)
        return Scenario(server, self.clients, self.profile)

    def head(self, n: int) -> "Scenario":
        """Scenario restricted to the first ``n`` clients."""
        return Scenario(self.server, self.clients[:n], self.profile)

    def to_dict(self) -> dict:
        return {
            "server": {"capacity_hz": self.server.capacity_hz,
                       "k_s": self.server.compute_intensity},
            "clients": [
                {"compute_hz": c.compute_hz, "batch_size": c.batch_size,
                 "uplink_bps": c.uplink_bps, "downlink_bps": c.downlink_bps,
                 "k_c": c.compute_intensity}
                for c in self.clients
            ],
            "profile": self.profile.to_dict(),
        }


def sample_clients(n_clients: int, seed: int) -> list[ClientConfig]:
    """Draw ``n_clients`` clients from a PCG64 stream seeded with ``seed``.

    Each client consumes three draws in a fixed order (compute, uplink,
    downlink multiplier), so the first k clients for a given seed do not
    depend on how many are drawn in total.
    """
    if n_clients < 1:
        raise ValueError("n_clients must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    clients = []
    for _ in range(n_clients):
        f = rng.uniform(*CLIENT_HZ_RANGE)
        up = rng.uniform(*UPLINK_BPS_RANGE)
        mult = rng.uniform(*DOWNLINK_MULTIPLIER_RANGE)
        clients.append(ClientConfig(float(f), BATCH_SIZE, float(up), float(up * mult),
                                    CLIENT_INTENSITY))
    return clients


def sample_scenario(n_clients: int, server_capacity_hz: float, profile: LayerProfile,
                    seed: int) -> Scenario:
    return Scenario(ServerConfig(float(server_capacity_hz), SERVER_INTENSITY),
                    tuple(sample_clients(n_clients, seed)), profile)


def _num(obj, key, where, path, integer=False):
    if key not in obj:
        raise ParseError("missing required field", field=f"{where}.{key}", path=path)
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}", field=f"{where}.{key}", path=path)
    if integer and not float(v).is_integer():
        raise ParseError(f"expected an integer, got {v!r}", field=f"{where}.{key}", path=path)
    return int(v) if integer else v


def scenario_from_dict(data, path=None, base_dir=None) -> Scenario:
    if not isinstance(data, dict):
        raise ParseError("scenario must be a JSON object", path=path)
    server = data.get("server")
    if not isinstance(server, dict):
        raise ParseError("missing or non-object field", field="server", path=path)
    capacity = _num(server, "capacity_hz", "server", path)
    k_s = _num(server, "k_s", "server", path)
    clients = data.get("clients")
    if not isinstance(clients, list):
        raise ParseError("missing or non-array field", field="clients", path=path)
    parsed = []
    for i, c in enumerate(clients):
        where = f"clients[{i}]"
        if not isinstance(c, dict):
            raise ParseError("expected an object", field=where, path=path)
        vals = (_num(c, "compute_hz", where, path), _num(c, "batch_size", where, path, True),
                _num(c, "uplink_bps", where, path), _num(c, "downlink_bps", where, path),
                _num(c, "k_c", where, path))
        parsed.append(vals)

    if "profile" in data:
        if not isinstance(data["profile"], dict):
            raise ParseError("expected an object", field="profile", path=path)
        profile = profile_from_dict(data["profile"], path=path)
    elif "profile_path" in data:
        ppath = Path(data["profile_path"])
        if not ppath.is_absolute() and base_dir is not None:
            ppath = Path(base_dir) / ppath
        profile = load_profile(ppath)
    else:
        raise ParseError("missing required field (or profile_path)", field="profile", path=path)

    if not parsed:
        raise InvariantViolation("scenario has at least one client")
    client_objs = []
    for i, vals in enumerate(parsed):
        try:
            client_objs.append(ClientConfig(*vals))
        except InvariantViolation as exc:
            raise InvariantViolation(f"clients[{i}]: {exc.invariant}") from exc
    return Scenario(ServerConfig(capacity, k_s), tuple(client_objs), profile)


def load_scenario(path, profile: LayerProfile | None = None) -> Scenario:
    """Load a scenario file; ``profile`` overrides any profile it names."""
    path = Path(path)
    data = _read_json(path)
    if profile is not None and isinstance(data, dict) and "profile" not in data:
        data = dict(data, profile=profile.to_dict())
        data.pop("profile_path", None)
    scenario = scenario_from_dict(data, path=path, base_dir=path.parent)
    if profile is not None:
        scenario = Scenario(scenario.server, scenario.clients, profile)
    return scenario


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=2) + "\n")
