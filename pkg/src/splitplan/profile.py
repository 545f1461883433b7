"""Per-layer model profiles: cumulative FP/BP workloads and cut-point activation sizes.

Workloads are in FLOPs per sample. Processor computing intensity (cycles/FLOP)
is applied later by the latency model. Activation sizes are bits per sample.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from itertools import accumulate
from pathlib import Path
from typing import Sequence

from .errors import InvariantViolation, LengthMismatch, NonPositiveEntry, ParseError

PROFILE_FIELDS = ("layers", "fp_flops", "bp_flops", "activation_bits")


@dataclass(frozen=True)
class LayerProfile:
    """Workload profile of an L-layer model.

    Built from per-layer (marginal) workloads; ``fp_cumulative[j-1]`` is the FP
    work of the first ``j`` layers. Indices in this class are 0-based, cut
    indices elsewhere are 1-based layer numbers.
    """

    fp_flops: tuple[float, ...]
    bp_flops: tuple[float, ...]
    activation_bits: tuple[float, ...]
    layer_names: tuple[str, ...] | None = None
    fp_cumulative: tuple[float, ...] = field(init=False, repr=False)
    bp_cumulative: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.fp_flops)
        if len(self.bp_flops) != n or len(self.activation_bits) != n:
            raise LengthMismatch(
                f"fp_flops, bp_flops and activation_bits must have equal length "
                f"(got {n}, {len(self.bp_flops)}, {len(self.activation_bits)})"
            )
        if n < 2:
            raise LengthMismatch(f"a split model needs at least 2 layers, got {n}")
        if self.layer_names is not None and len(self.layer_names) != n:
            raise LengthMismatch("layer_names must have one entry per layer")
        for name, values in (("fp_flops", self.fp_flops), ("bp_flops", self.bp_flops),
                             ("activation_bits", self.activation_bits)):
            for i, v in enumerate(values):
                if not (math.isfinite(v) and v > 0):
                    raise NonPositiveEntry(f"{name}[{i}] = {v!r} must be finite and > 0")
        object.__setattr__(self, "fp_cumulative", tuple(accumulate(self.fp_flops)))
        object.__setattr__(self, "bp_cumulative", tuple(accumulate(self.bp_flops)))

    @property
    def layer_count(self) -> int:
        return len(self.fp_flops)

    @property
    def total_fp(self) -> float:
        return self.fp_cumulative[-1]

    @property
    def total_bp(self) -> float:
        return self.bp_cumulative[-1]

    def to_dict(self) -> dict:
        d = {
            "layers": self.layer_count,
            "fp_flops": list(self.fp_flops),
            "bp_flops": list(self.bp_flops),
            "activation_bits": list(self.activation_bits),
        }
        if self.layer_names is not None:
            d["layer_names"] = list(self.layer_names)
        return d


def build_profile(per_layer_fp: Sequence[float], per_layer_bp: Sequence[float],
                  activation_bits: Sequence[float],
                  layer_names: Sequence[str] | None = None) -> LayerProfile:
    """Build a profile from per-layer FP/BP FLOPs and per-cut activation bits."""
    return LayerProfile(
        fp_flops=tuple(float(v) for v in per_layer_fp),
        bp_flops=tuple(float(v) for v in per_layer_bp),
        activation_bits=tuple(float(v) for v in activation_bits),
        layer_names=None if layer_names is None else tuple(layer_names),
    )


def _number_list(data, key, path):
    value = data.get(key)
    if value is None:
        raise ParseError("missing required field", field=key, path=path)
    if not isinstance(value, list):
        raise ParseError("expected an array of numbers", field=key, path=path)
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"entry {i} is not a number: {v!r}", field=key, path=path)
    return value


def profile_from_dict(data, path=None) -> LayerProfile:
    """Validate a decoded profile document and build the profile.

    Schema violations raise :class:`ParseError`; documents that parse but break
    a profile invariant raise :class:`InvariantViolation`.
    """
    if not isinstance(data, dict):
        raise ParseError("profile must be a JSON object", path=path)
    layers = data.get("layers")
    if layers is None:
        raise ParseError("missing required field", field="layers", path=path)
    if isinstance(layers, bool) or not isinstance(layers, int):
        raise ParseError(f"expected an integer, got {layers!r}", field="layers", path=path)
    fp = _number_list(data, "fp_flops", path)
    bp = _number_list(data, "bp_flops", path)
    act = _number_list(data, "activation_bits", path)
    names = data.get("layer_names")
    if names is not None and (not isinstance(names, list)
                              or not all(isinstance(s, str) for s in names)):
        raise ParseError("expected an array of strings", field="layer_names", path=path)

    if layers < 2:
        raise InvariantViolation("layers >= 2", f"got {layers}")
    for key, seq in (("fp_flops", fp), ("bp_flops", bp), ("activation_bits", act)):
        if len(seq) != layers:
            raise InvariantViolation(f"{key} has exactly `layers` entries",
                                     f"{len(seq)} != {layers}")
    if names is not None and len(names) != layers:
        raise InvariantViolation("layer_names has exactly `layers` entries")
    # Marginal work <= 0 means the cumulative sequence is not increasing.
    for key, label in (("fp_flops", "fp_cumulative"), ("bp_flops", "bp_cumulative")):
        seq = data[key]
        for i, v in enumerate(seq):
            if not math.isfinite(v):
                raise InvariantViolation(f"{label} finite", f"{key}[{i}] = {v!r}")
            if v < 0:
                raise InvariantViolation(f"{label} non-decreasing", f"{key}[{i}] = {v!r}")
            if v == 0:
                raise InvariantViolation(f"{label} strictly positive per layer",
                                         f"{key}[{i}] = 0")
    for i, v in enumerate(act):
        if not (math.isfinite(v) and v > 0):
            raise InvariantViolation("activation_bits > 0", f"activation_bits[{i}] = {v!r}")
    return build_profile(fp, bp, act, names)


def _read_json(path):
    path = Path(path)
    text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                         path=path) from exc


def load_profile(path) -> LayerProfile:
    return profile_from_dict(_read_json(path), path=Path(path))


def save_profile(profile: LayerProfile, path) -> None:
    Path(path).write_text(json.dumps(profile.to_dict(), indent=2) + "\n")


def resnet18_profile() -> LayerProfile:
    """Bundled block-level ResNet-18 profile at 224x224x3 input.

    Ten layers: stem (conv1/bn/relu/maxpool), the eight basic blocks
    layer1.0 ... layer4.1 (cuts fall after each skip connection), and the
    classifier (avgpool + fc, 1000 classes). FP FLOPs count 2 per
    multiply-accumulate of every conv and linear layer; BN, ReLU, pooling and
    residual adds are ignored. BP FLOPs are 2x FP. Activation size is the
    block output element count times 32 bits.
    """
    text = resources.files("splitplan").joinpath("data/resnet18.json").read_text()
    return profile_from_dict(json.loads(text))


def toy_profile() -> LayerProfile:
    """Four-layer profile used by tests and examples."""
    return build_profile([100, 200, 300, 400], [200, 400, 600, 800], [8000, 4000, 2000, 1000])
