"""Quantitative evaluation of edit directions.

Conventions (stated in every report header): the sparsity metric
``l1_mean_abs`` is the mean absolute value over all 18*512 = 9216 entries,
and the magnitude metric ``l2_euclidean`` is the unnormalized Euclidean norm
over the same entries. Per-layer traces are mean absolute values over each
512-channel row.

Reports can carry reference measurements from the full-scale StyleGAN2
pipeline for side-by-side display; those numbers come from a different
generator and mapper and are never asserted against results computed here.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass

import numpy as np

from .core import NUM_ENTRIES, NUM_LAYERS, EditConfig, EditDirection, LatentCode
from .errors import ConfigError
from .oracle import ToyGenerator, leakage_report

METRIC_CONVENTIONS = (
    "l1_mean_abs = mean(|d|) over 9216 entries; "
    "l2_euclidean = sqrt(sum(d^2)); per-layer = mean(|d|) per 512-channel row"
)

# Published full-scale measurements (dense baseline vs hard-masked editing),
# display metadata only.
REFERENCE_FULL_SCALE = {
    "baseline": {"l1_mean_abs": 0.152, "l2_euclidean": 23.10},
    "improved": {"l1_mean_abs": 0.041, "l2_euclidean": 13.20},
}


@dataclass(frozen=True)
class EditMetrics:
    """Sparsity/magnitude summary of one edit direction."""

    l1_mean_abs: float
    l2_euclidean: float
    per_layer_mean_abs: tuple
    leakage: "dict | None" = None

    def to_dict(self) -> dict:
        out = {
            "l1_mean_abs": self.l1_mean_abs,
            "l2_euclidean": self.l2_euclidean,
            "per_layer_mean_abs": list(self.per_layer_mean_abs),
        }
        if self.leakage is not None:
            out["leakage"] = dict(self.leakage)
        return out


def compute_metrics(
    d: EditDirection,
    generator: "ToyGenerator | None" = None,
    w: "LatentCode | None" = None,
    cfg: "EditConfig | None" = None,
) -> EditMetrics:
    """Measure a direction; include attribute leakage when an oracle is given."""
    leakage = None
    if generator is not None:
        if w is None or cfg is None:
            raise ConfigError("leakage needs both a latent code and an edit config")
        leakage = leakage_report(generator, w, d, cfg)
    abs_vals = np.abs(d.values)
    return EditMetrics(
        l1_mean_abs=float(abs_vals.sum() / NUM_ENTRIES),
        l2_euclidean=float(np.sqrt((d.values**2).sum())),
        per_layer_mean_abs=tuple(float(x) for x in abs_vals.mean(axis=1)),
        leakage=leakage,
    )


@dataclass(frozen=True)
class StrategySummary:
    name: str
    metrics: EditMetrics
    iterations: int
    first_loss: "float | None"
    final_loss: "float | None"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "metrics": self.metrics.to_dict(),
            "trace": {
                "iterations": self.iterations,
                "first_loss": self.first_loss,
                "final_loss": self.final_loss,
            },
        }


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side strategy comparison with evaluated metric orderings.

    ``orderings`` lists strategy names ascending per metric; ``winners``
    holds every name attaining the minimum (more than one means a tie).
    """

    strategies: tuple
    orderings: dict
    winners: dict
    reference: dict

    def to_dict(self) -> dict:
        return {
            "conventions": METRIC_CONVENTIONS,
            "strategies": {s.name: s.to_dict() for s in self.strategies},
            "orderings": {k: list(v) for k, v in self.orderings.items()},
            "winners": {k: list(v) for k, v in self.winners.items()},
            "reference_full_scale": {
                "note": (
                    "published full-scale StyleGAN2 measurements, shown for "
                    "display only; not produced by this toy pipeline"
                ),
                **self.reference,
            },
        }


def compare_strategies(
    results: dict,
    generator: "ToyGenerator | None" = None,
    w: "LatentCode | None" = None,
    cfg: "EditConfig | None" = None,
    target_attribute: str = "hair",
) -> ComparisonReport:
    """Compare converged (direction, trace) pairs across >= 2 strategies."""
    if len(results) < 2:
        raise ConfigError(f"need at least 2 strategies to compare, got {len(results)}")
    summaries = []
    for name, (direction, trace) in results.items():
        m = compute_metrics(direction, generator, w, cfg)
        summaries.append(
            StrategySummary(
                name=name,
                metrics=m,
                iterations=len(trace),
                first_loss=trace[0].loss if trace else None,
                final_loss=trace[-1].loss if trace else None,
            )
        )
    orderings = {}
    winners = {}
    for key in ("l1_mean_abs", "l2_euclidean"):
        values = {s.name: getattr(s.metrics, key) for s in summaries}
        ordered = sorted(values, key=lambda n: (values[n], n))
        best = values[ordered[0]]
        orderings[key] = ordered
        winners[key] = [n for n in ordered if values[n] == best]
    if generator is not None:
        non_target = {
            s.name: sum(abs(v) for a, v in s.metrics.leakage.items() if a != target_attribute)
            for s in summaries
        }
        ordered = sorted(non_target, key=lambda n: (non_target[n], n))
        best = non_target[ordered[0]]
        orderings["non_target_leakage"] = ordered
        winners["non_target_leakage"] = [n for n in ordered if non_target[n] == best]
    return ComparisonReport(tuple(summaries), orderings, winners, dict(REFERENCE_FULL_SCALE))


def trace_to_csv(trace) -> str:
    """Optimizer trace as CSV with columns iteration, loss, l1, l2."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iteration", "loss", "l1", "l2"])
    for entry in trace:
        writer.writerow(
            [entry.iteration, repr(entry.loss), repr(entry.l1_mean_abs), repr(entry.l2_euclidean)]
        )
    return buf.getvalue()


def per_layer_csv(metrics: EditMetrics) -> str:
    """Per-layer mean-absolute trace as CSV with columns layer, mean_abs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["layer", "mean_abs"])
    for i in range(NUM_LAYERS):
        writer.writerow([i, repr(metrics.per_layer_mean_abs[i])])
    return buf.getvalue()
