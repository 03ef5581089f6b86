"""Inference-only feed-forward mapper predicting edit directions.

A mapper holds up to three sub-networks (coarse/medium/fine in the usual
setup), each an ordered chain of affine layers with a nonlinearity tag.
Every latent row assigned to a group is pushed through that group's chain
independently; unassigned rows map to the zero direction.

Weight-file layout (magic ``LFMAP1``), all integers little-endian:

    magic               6 bytes  b"LFMAP1"
    group_count         u32
    per group:
      assigned_count    u32
      assigned layers   assigned_count x u32
      layer_count       u32
      per layer:
        rows, cols      u32, u32     (output dim, input dim)
        activation      u8           (0 linear, 1 relu, 2 leaky-relu 0.2)
        weights         rows*cols f64, row-major
        bias            rows f64

A layer computes ``y = W @ x + b`` then its activation; chains must consume
and produce 512-wide rows.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .core import NUM_CHANNELS, NUM_LAYERS, EditDirection, LatentCode
from .errors import MapperFormatError, NonFiniteError

MAPPER_MAGIC = b"LFMAP1"
LEAKY_SLOPE = 0.2

ACTIVATION_TAGS = {"linear": 0, "relu": 1, "leaky_relu": 2}
_ACTIVATION_BY_TAG = {v: k for k, v in ACTIVATION_TAGS.items()}


def _activate(name: str, x: np.ndarray) -> np.ndarray:
    if name == "linear":
        return x
    if name == "relu":
        return np.maximum(x, 0.0)
    if name == "leaky_relu":
        return np.where(x >= 0.0, x, LEAKY_SLOPE * x)
    raise MapperFormatError(f"unknown activation {name!r}")


@dataclass(frozen=True)
class AffineLayer:
    """One affine map plus nonlinearity: y = act(W @ x + b)."""

    weight: np.ndarray
    bias: np.ndarray
    activation: str = "linear"

    def __post_init__(self):
        w = np.asarray(self.weight, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if w.ndim != 2:
            raise MapperFormatError(f"dimension mismatch: weight must be 2-D, got {w.shape}")
        if b.shape != (w.shape[0],):
            raise MapperFormatError(
                f"dimension mismatch: bias shape {b.shape} does not match {w.shape[0]} output rows"
            )
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise MapperFormatError("mapper weights must be finite")
        if self.activation not in ACTIVATION_TAGS:
            raise MapperFormatError(f"unknown activation {self.activation!r}")
        w = w.copy()
        w.setflags(write=False)
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True)
class MapperGroup:
    """A sub-network and the latent layers it is responsible for."""

    assigned: tuple
    net: tuple

    def __post_init__(self):
        assigned = tuple(int(i) for i in self.assigned)
        net = tuple(self.net)
        if not all(0 <= i < NUM_LAYERS for i in assigned):
            raise MapperFormatError(
                f"assigned layers must lie in 0..{NUM_LAYERS - 1}, got {assigned}"
            )
        if len(set(assigned)) != len(assigned):
            raise MapperFormatError(f"duplicate assigned layer in {assigned}")
        if not net:
            raise MapperFormatError("a mapper group needs at least one affine layer")
        if net[0].in_dim != NUM_CHANNELS or net[-1].out_dim != NUM_CHANNELS:
            raise MapperFormatError(
                f"dimension mismatch: chain must map {NUM_CHANNELS} -> {NUM_CHANNELS}, "
                f"got {net[0].in_dim} -> {net[-1].out_dim}"
            )
        for first, second in zip(net, net[1:]):
            if second.in_dim != first.out_dim:
                raise MapperFormatError(
                    f"dimension mismatch: layer expects {second.in_dim} inputs "
                    f"but previous layer yields {first.out_dim}"
                )
        object.__setattr__(self, "assigned", assigned)
        object.__setattr__(self, "net", net)


@dataclass(frozen=True)
class MapperModel:
    """Up to three per-row sub-networks plus their layer assignment."""

    groups: tuple

    def __post_init__(self):
        groups = tuple(self.groups)
        if not 1 <= len(groups) <= 3:
            raise MapperFormatError(f"mapper must have 1..3 groups, got {len(groups)}")
        seen = set()
        for g in groups:
            overlap = seen.intersection(g.assigned)
            if overlap:
                raise MapperFormatError(
                    f"latent layers {sorted(overlap)} assigned to more than one group"
                )
            seen.update(g.assigned)
        object.__setattr__(self, "groups", groups)


class _Reader:
    """Byte cursor raising a structured error on truncation."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MapperFormatError("truncated mapper file")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u8(self) -> int:
        return self.take(1)[0]

    def f64s(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<f8").copy()


def load_mapper(data: bytes) -> MapperModel:
    """Parse an ``LFMAP1`` weight file into a validated model."""
    r = _Reader(bytes(data))
    if r.take(len(MAPPER_MAGIC)) != MAPPER_MAGIC:
        raise MapperFormatError("not a mapper weight file: bad magic")
    n_groups = r.u32()
    if not 1 <= n_groups <= 3:
        raise MapperFormatError(f"mapper must have 1..3 groups, got {n_groups}")
    groups = []
    for _ in range(n_groups):
        n_assigned = r.u32()
        if n_assigned > NUM_LAYERS:
            raise MapperFormatError(f"group claims {n_assigned} assigned layers")
        assigned = tuple(r.u32() for _ in range(n_assigned))
        n_layers = r.u32()
        if n_layers == 0 or n_layers > 64:
            raise MapperFormatError(f"implausible layer count {n_layers}")
        net = []
        for _ in range(n_layers):
            rows = r.u32()
            cols = r.u32()
            tag = r.u8()
            if tag not in _ACTIVATION_BY_TAG:
                raise MapperFormatError(f"unknown activation tag {tag}")
            if rows == 0 or cols == 0:
                raise MapperFormatError(f"dimension mismatch: empty weight {rows}x{cols}")
            weight = r.f64s(rows * cols).reshape(rows, cols)
            bias = r.f64s(rows)
            net.append(AffineLayer(weight, bias, _ACTIVATION_BY_TAG[tag]))
        groups.append(MapperGroup(assigned, tuple(net)))
    if r.pos != len(r.data):
        raise MapperFormatError(f"{len(r.data) - r.pos} trailing bytes after mapper data")
    return MapperModel(tuple(groups))


def write_mapper(model: MapperModel) -> bytes:
    """Serialize a model in the ``LFMAP1`` layout."""
    out = [MAPPER_MAGIC, struct.pack("<I", len(model.groups))]
    for g in model.groups:
        out.append(struct.pack("<I", len(g.assigned)))
        out.extend(struct.pack("<I", i) for i in g.assigned)
        out.append(struct.pack("<I", len(g.net)))
        for layer in g.net:
            out.append(
                struct.pack("<IIB", layer.out_dim, layer.in_dim, ACTIVATION_TAGS[layer.activation])
            )
            out.append(layer.weight.astype("<f8").tobytes(order="C"))
            out.append(layer.bias.astype("<f8").tobytes(order="C"))
    return b"".join(out)


def mapper_forward(model: MapperModel, w: LatentCode) -> EditDirection:
    """Predict an edit direction: each assigned row through its group's chain.

    Deterministic; unassigned latent rows yield zero rows. Raises
    :class:`NonFiniteError` if any intermediate activation diverges.
    """
    out = np.zeros((NUM_LAYERS, NUM_CHANNELS))
    for g in model.groups:
        if not g.assigned:
            continue
        rows = w.values[list(g.assigned)]
        for layer in g.net:
            rows = _activate(layer.activation, rows @ layer.weight.T + layer.bias)
            if not np.isfinite(rows).all():
                raise NonFiniteError("mapper forward pass produced a non-finite value")
        out[list(g.assigned)] = rows
    return EditDirection(out)
