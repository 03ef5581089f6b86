"""Gradient descent over edit directions under three regularization regimes.

The same plain descent loop runs in three flavours, differing only in what
happens around the gradient step:

* ``L2Penalty(mu)``  - descend on loss + mu * ||d||_2^2 (dense updates).
* ``L1Prox(lam)``    - descend on the loss, then soft-threshold with
  step_size * lam: proximal gradient, which produces exact zeros.
* ``HardMask(mask)`` - descend, then zero every locked row: projected
  gradient onto the allowed support.

No momentum or adaptive stepping; the loop is deterministic per
(objective, config, init).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .core import (
    NUM_ENTRIES,
    EditDirection,
    HardMask,
    L1Prox,
    mask_direction,
    soft_threshold_values,
)
from .errors import ConfigError, NonFiniteError, OptimizationError


@dataclass(frozen=True)
class L2Penalty:
    """Quadratic magnitude penalty mu * ||d||_2^2 added to the loss."""

    mu: float

    def __post_init__(self):
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ConfigError(f"l2 penalty mu must be >= 0, got {self.mu}")


OptStrategy = Union[L2Penalty, L1Prox, HardMask]


@dataclass(frozen=True)
class Objective:
    """A differentiable loss over edit directions.

    ``evaluate(d)`` returns ``(loss, gradient)`` with the gradient shaped like
    the direction; it must be deterministic.
    """

    evaluate: Callable
    description: str = ""


@dataclass(frozen=True)
class OptimizerConfig:
    """Descent loop parameters.

    ``seed`` is the single entropy source for randomized initialization;
    the default zero init is deterministic and ignores it.
    """

    step_size: float = 0.05
    iterations: int = 500
    strategy: OptStrategy = field(default_factory=lambda: L2Penalty(0.01))
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.step_size) or self.step_size <= 0:
            raise ConfigError(f"step_size must be > 0, got {self.step_size}")
        if self.iterations < 0:
            raise ConfigError(f"iterations must be >= 0, got {self.iterations}")
        if not isinstance(self.strategy, (L2Penalty, L1Prox, HardMask)):
            raise ConfigError(f"unknown optimizer strategy {self.strategy!r}")


@dataclass(frozen=True)
class TraceEntry:
    """One optimizer iteration.

    ``loss`` is the objective value at the iterate the step was computed
    from; ``l1_mean_abs`` / ``l2_euclidean`` describe the direction produced
    by the step. ``locked_l1`` is the absolute mass sitting in locked rows
    after the step (hard-mask runs only, None otherwise) so the support
    invariant can be asserted straight from the trace.
    """

    iteration: int
    loss: float
    l1_mean_abs: float
    l2_euclidean: float
    locked_l1: "float | None" = None


def soft_threshold(d: EditDirection, lam: float) -> EditDirection:
    """Elementwise sign(x) * max(|x| - lam, 0): the prox of lam * ||.||_1."""
    if not np.isfinite(lam) or lam < 0:
        raise ConfigError(f"soft threshold lambda must be >= 0, got {lam}")
    return EditDirection(soft_threshold_values(d.values, lam))


def _mean_abs(values: np.ndarray) -> float:
    return float(np.abs(values).sum() / NUM_ENTRIES)


def optimize_direction(
    obj: Objective, cfg: OptimizerConfig, init: "EditDirection | None" = None
) -> "tuple[EditDirection, list[TraceEntry]]":
    """Run the configured descent loop and return (direction, full trace).

    A hard-mask run first projects the init onto the allowed support, so every
    iterate (including a zero-iteration run) is feasible. Non-finite losses or
    gradients abort with :class:`OptimizationError` carrying the iteration.
    """
    d = EditDirection.zeros() if init is None else init
    strategy = cfg.strategy
    locked_rows = None
    if isinstance(strategy, HardMask):
        d = mask_direction(d, strategy.mask)
        locked_rows = ~strategy.mask.active_rows
    trace: "list[TraceEntry]" = []
    eta = cfg.step_size
    for k in range(cfg.iterations):
        loss, grad = obj.evaluate(d)
        if not np.isfinite(loss):
            raise OptimizationError(f"non-finite loss at iteration {k}", iteration=k)
        if not np.isfinite(grad.values).all():
            raise OptimizationError(f"non-finite gradient at iteration {k}", iteration=k)

        try:
            if isinstance(strategy, L2Penalty):
                loss = loss + strategy.mu * float((d.values**2).sum())
                stepped = d.values - eta * (grad.values + 2.0 * strategy.mu * d.values)
                d = EditDirection(stepped)
                locked_l1 = None
            elif isinstance(strategy, L1Prox):
                loss = loss + strategy.lam * float(np.abs(d.values).sum())
                stepped = d.values - eta * grad.values
                d = EditDirection(soft_threshold_values(stepped, eta * strategy.lam))
                locked_l1 = None
            else:
                stepped = d.values - eta * grad.values
                d = mask_direction(EditDirection(stepped), strategy.mask)
                locked_l1 = float(np.abs(d.values[locked_rows]).sum())
        except NonFiniteError as exc:
            raise OptimizationError(
                f"non-finite iterate at iteration {k}: {exc}", iteration=k
            ) from exc

        trace.append(
            TraceEntry(
                iteration=k,
                loss=float(loss),
                l1_mean_abs=_mean_abs(d.values),
                l2_euclidean=float(np.sqrt((d.values**2).sum())),
                locked_l1=locked_l1,
            )
        )
    return d, trace


def sample_coords(num: int, seed: int = 0) -> "list[tuple[int, int]]":
    """Sample ``num`` distinct (layer, channel) coordinates, reproducibly."""
    rng = np.random.default_rng(seed)
    flat = rng.choice(NUM_ENTRIES, size=min(num, NUM_ENTRIES), replace=False)
    return [(int(i) // 512, int(i) % 512) for i in flat]


def finite_difference_gradient(
    obj: Objective,
    d: EditDirection,
    h: float,
    coords: "list[tuple[int, int]] | None" = None,
) -> EditDirection:
    """Central-difference gradient (loss(d+h e) - loss(d-h e)) / 2h.

    Evaluates only ``coords`` when given (cost control on the 9216-entry
    grid; see :func:`sample_coords`), every coordinate otherwise. Entries
    not probed are zero in the returned direction.
    """
    if not np.isfinite(h) or h <= 0:
        raise ConfigError(f"finite-difference step must be > 0, got {h}")
    if coords is None:
        coords = [(i, j) for i in range(18) for j in range(512)]
    out = np.zeros((18, 512))
    base = d.values
    for i, j in coords:
        probe = base.copy()
        probe[i, j] = base[i, j] + h
        plus, _ = obj.evaluate(EditDirection(probe))
        probe[i, j] = base[i, j] - h
        minus, _ = obj.evaluate(EditDirection(probe))
        out[i, j] = (plus - minus) / (2.0 * h)
    return EditDirection(out)
