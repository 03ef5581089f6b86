"""Core value types and update rules for hierarchical latent-code editing.

A latent code lives in the extended W+ space: an 18x512 real matrix, one
512-channel style row per synthesis layer. Edits are applied as

    w_new = w + alpha * edit_factor * d'

where ``d'`` is the raw mapper direction after the configured strategy's
transform: identity (dense), elementwise soft-thresholding (l1-prox), or hard
layer masking that zeroes every row outside an active set. All types here are
immutable and all operations are pure, so they are safe to use concurrently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ConfigError, NonFiniteError, ShapeMismatchError

NUM_LAYERS = 18
NUM_CHANNELS = 512
NUM_ENTRIES = NUM_LAYERS * NUM_CHANNELS

LATENT_SHAPE = (NUM_LAYERS, NUM_CHANNELS)


def _freeze(values: np.ndarray, kind: str) -> np.ndarray:
    """Validate an 18x512 finite float matrix and return a read-only copy."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != LATENT_SHAPE:
        raise ShapeMismatchError(
            f"{kind} must have shape {LATENT_SHAPE}, got {arr.shape}"
        )
    finite = np.isfinite(arr)
    if not finite.all():
        layer, channel = np.argwhere(~finite)[0]
        raise NonFiniteError(
            f"{kind} entry at layer {layer}, channel {channel} is not finite",
            layer=int(layer),
            channel=int(channel),
        )
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LatentCode:
    """A point w in W+: 18 layers of 512 style coordinates, all finite."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values, "latent code"))

    @classmethod
    def zeros(cls) -> "LatentCode":
        return cls(np.zeros(LATENT_SHAPE))


@dataclass(frozen=True)
class EditDirection:
    """A latent edit direction: per-channel offsets, same shape as a code."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values, "edit direction"))

    @classmethod
    def zeros(cls) -> "EditDirection":
        return cls(np.zeros(LATENT_SHAPE))


@dataclass(frozen=True)
class LayerMask:
    """A partition of the 18 layer indices into an active and a locked set.

    Rows in ``active`` pass an edit direction through; all other rows are
    forced to zero. The canonical ultra-strict mask keeps only the medium
    layers 4-7 active, locking the coarse (0-3) and fine (8-17) layers.
    """

    active: frozenset = field()

    def __post_init__(self):
        active = frozenset(int(i) for i in self.active)
        if not all(0 <= i < NUM_LAYERS for i in active):
            raise ConfigError(
                f"mask layers must lie in 0..{NUM_LAYERS - 1}, got {sorted(active)}"
            )
        object.__setattr__(self, "active", active)

    @property
    def locked(self) -> frozenset:
        return frozenset(range(NUM_LAYERS)) - self.active

    @property
    def active_rows(self) -> np.ndarray:
        """Boolean row selector, True where the layer is active."""
        sel = np.zeros(NUM_LAYERS, dtype=bool)
        sel[sorted(self.active)] = True
        return sel

    @classmethod
    def from_ranges(cls, spec: str) -> "LayerMask":
        """Parse comma-separated active ranges, e.g. ``"4-7"`` or ``"0,9-17"``."""
        active = set()
        for part in spec.split(","):
            part = part.strip()
            m = re.fullmatch(r"(\d+)(?:-(\d+))?", part)
            if not m:
                raise ConfigError(f"bad mask range {part!r} in spec {spec!r}")
            lo = int(m.group(1))
            hi = int(m.group(2)) if m.group(2) is not None else lo
            if hi < lo:
                raise ConfigError(f"descending mask range {part!r} in spec {spec!r}")
            active.update(range(lo, hi + 1))
        return cls(frozenset(active))


ULTRA_STRICT_MASK = LayerMask(frozenset(range(4, 8)))


@dataclass(frozen=True)
class Dense:
    """Apply the direction as-is on every layer."""


@dataclass(frozen=True)
class L1Prox:
    """Soft-threshold the direction elementwise before applying it."""

    lam: float

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ConfigError(f"l1-prox lambda must be >= 0, got {self.lam}")


@dataclass(frozen=True)
class HardMask:
    """Zero the direction on every locked layer before applying it."""

    mask: LayerMask


EditStrategy = Union[Dense, L1Prox, HardMask]


@dataclass(frozen=True)
class EditConfig:
    """Edit strength and strategy: w_new = w + alpha * edit_factor * d'."""

    alpha: float = 0.1
    edit_factor: float = 3.0
    strategy: EditStrategy = Dense()

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha <= 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if not np.isfinite(self.edit_factor):
            raise ConfigError(f"edit_factor must be finite, got {self.edit_factor}")
        if not isinstance(self.strategy, (Dense, L1Prox, HardMask)):
            raise ConfigError(f"unknown strategy {self.strategy!r}")


def soft_threshold_values(values: np.ndarray, lam: float) -> np.ndarray:
    """Elementwise sign(x) * max(|x| - lam, 0), the prox of lam * ||.||_1."""
    return np.sign(values) * np.maximum(np.abs(values) - lam, 0.0)


def mask_direction(d: EditDirection, m: LayerMask) -> EditDirection:
    """Zero every locked-layer row of ``d``, keeping active rows untouched.

    Idempotent, and commutes exactly with scalar multiplication.
    """
    out = np.zeros(LATENT_SHAPE)
    rows = m.active_rows
    out[rows] = d.values[rows]
    return EditDirection(out)


def transform_direction(d: EditDirection, strategy: EditStrategy) -> EditDirection:
    """The strategy's direction transform, before any scaling is applied."""
    if isinstance(strategy, Dense):
        return d
    if isinstance(strategy, L1Prox):
        return EditDirection(soft_threshold_values(d.values, strategy.lam))
    if isinstance(strategy, HardMask):
        return mask_direction(d, strategy.mask)
    raise ConfigError(f"unknown strategy {strategy!r}")


def apply_edit(w: LatentCode, d: EditDirection, cfg: EditConfig) -> LatentCode:
    """Apply a predicted edit direction to a latent code.

    Returns ``w + alpha * edit_factor * d'`` with ``d'`` the strategy-transformed
    direction. The input code is never mutated; with a hard-mask strategy the
    locked rows of the result are bit-for-bit identical to the input's, and a
    zero edit factor returns the input code exactly.
    """
    if w.values.shape != d.values.shape:
        raise ShapeMismatchError(
            f"latent code shape {w.values.shape} != direction shape {d.values.shape}"
        )
    scale = cfg.alpha * cfg.edit_factor
    if scale == 0.0:
        return w
    moved = transform_direction(d, cfg.strategy)
    with np.errstate(over="ignore", invalid="ignore"):
        new = w.values + scale * moved.values
    if isinstance(cfg.strategy, HardMask):
        # Re-copy locked rows: w + 0.0 can flip the sign bit of a -0.0 entry.
        locked = ~cfg.strategy.mask.active_rows
        new[locked] = w.values[locked]
    finite = np.isfinite(new)
    if not finite.all():
        layer, channel = np.argwhere(~finite)[0]
        raise NonFiniteError(
            f"edited code is not finite at layer {layer}, channel {channel} "
            f"(alpha={cfg.alpha}, edit_factor={cfg.edit_factor})",
            layer=int(layer),
            channel=int(channel),
        )
    return LatentCode(new)
