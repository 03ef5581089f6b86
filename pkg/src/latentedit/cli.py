"""Command-line surface: fixture generation, editing, strategy comparison.

Exit codes are a stable contract: 0 success, 2 usage or input error,
3 failed result assertion (a comparison ordering that did not hold).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .core import (
    ULTRA_STRICT_MASK,
    Dense,
    EditConfig,
    EditDirection,
    HardMask,
    L1Prox,
    LatentCode,
    LayerMask,
    apply_edit,
    transform_direction,
)
from .errors import LatentEditError
from .mapper import AffineLayer, MapperGroup, MapperModel, load_mapper, mapper_forward, write_mapper
from .metrics import compare_strategies, compute_metrics, per_layer_csv, trace_to_csv
from .npyio import LatentArchive, read_npy, write_npy
from .optim import L2Penalty, OptimizerConfig, optimize_direction
from .oracle import make_benchmark

FIXTURE_CODES = 8
LATENTS_NAME = "latents.npy"
MAPPER_NAME = "mapper.lfmap"
GENERATOR_NAME = "generator.npy"


def _toy_mapper(rng: np.random.Generator) -> MapperModel:
    """Three-group mapper (coarse/medium/fine), 512 -> 64 -> 512 per group."""
    groups = []
    for assigned in (range(0, 4), range(4, 8), range(8, 18)):
        hidden = AffineLayer(
            rng.standard_normal((64, 512)) / np.sqrt(512.0),
            rng.standard_normal(64) * 0.01,
            "leaky_relu",
        )
        out = AffineLayer(
            rng.standard_normal((512, 64)) / np.sqrt(64.0),
            np.zeros(512),
            "linear",
        )
        groups.append(MapperGroup(tuple(assigned), (hidden, out)))
    return MapperModel(tuple(groups))


def cmd_gen_fixtures(args) -> int:
    from .oracle import canonical_generator

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    latents = LatentArchive.from_array(rng.standard_normal((FIXTURE_CODES, 18, 512)))
    (out_dir / LATENTS_NAME).write_bytes(write_npy(latents))

    (out_dir / MAPPER_NAME).write_bytes(write_mapper(_toy_mapper(rng)))

    coupling = canonical_generator(args.seed).coupling
    (out_dir / GENERATOR_NAME).write_bytes(write_npy(LatentArchive.from_array(coupling)))

    print(f"wrote {LATENTS_NAME}, {MAPPER_NAME}, {GENERATOR_NAME} to {out_dir}")
    return 0


def _edit_strategy(args):
    if args.strategy == "dense":
        return Dense()
    if args.strategy == "l1-prox":
        return L1Prox(args.lam)
    return HardMask(LayerMask.from_ranges(args.mask))


def cmd_edit(args) -> int:
    archive = read_npy(Path(args.latents).read_bytes())
    model = load_mapper(Path(args.mapper).read_bytes())
    strategy = _edit_strategy(args)
    cfg = EditConfig(alpha=args.alpha, edit_factor=args.edit_factor, strategy=strategy)

    edited = []
    rows = []
    preserved = 0
    for index, w in enumerate(archive.codes):
        d = mapper_forward(model, w)
        w_new = apply_edit(w, d, cfg)
        edited.append(w_new)
        applied = transform_direction(d, strategy)
        rows.append({"index": index, **compute_metrics(applied).to_dict()})
        if isinstance(strategy, HardMask):
            locked = ~strategy.mask.active_rows
            if w_new.values[locked].tobytes() == w.values[locked].tobytes():
                preserved += 1
    if isinstance(strategy, HardMask):
        print(f"locked-layer check: {preserved}/{len(archive)} codes preserved bitwise")
        if preserved != len(archive):
            print("assertion failed: locked layers were modified", file=sys.stderr)
            return 3

    out = LatentArchive(tuple(edited), archive.source_dtype)
    Path(args.out_latents).write_bytes(write_npy(out, dtype=args.dtype))
    payload = {
        "alpha": args.alpha,
        "edit_factor": args.edit_factor,
        "strategy": args.strategy,
        "codes": rows,
    }
    Path(args.out_metrics).write_text(json.dumps(payload, indent=2) + "\n")
    print(f"edited {len(archive)} codes -> {args.out_latents}")
    return 0


def cmd_compare(args) -> int:
    bench = make_benchmark(args.seed)
    strategies = {
        "l2_penalty": L2Penalty(args.mu),
        "l1_prox": L1Prox(args.lam),
        "hard_mask": HardMask(ULTRA_STRICT_MASK),
    }
    results = {}
    for name, strategy in strategies.items():
        cfg = OptimizerConfig(
            step_size=args.step, iterations=args.iters, strategy=strategy, seed=args.seed
        )
        results[name] = optimize_direction(bench.objective, cfg)

    # The benchmark objective is over the total latent offset, so leakage is
    # evaluated at unit scale; converged directions are applied as-is.
    unit = EditConfig(alpha=1.0, edit_factor=1.0, strategy=Dense())
    report = compare_strategies(
        results,
        generator=bench.generator,
        w=LatentCode.zeros(),
        cfg=unit,
        target_attribute=bench.target_attribute,
    )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    for name, (direction, trace) in results.items():
        (out_dir / f"trace_{name}.csv").write_text(trace_to_csv(trace))
        (out_dir / f"layers_{name}.csv").write_text(per_layer_csv(compute_metrics(direction)))

    by_name = {s.name: s for s in report.strategies}
    print(f"strategy      {'l1_mean_abs':>12} {'l2_euclidean':>12}  leakage (non-target)")
    for name in strategies:
        s = by_name[name]
        non_target = {
            a: v for a, v in s.metrics.leakage.items() if a != bench.target_attribute
        }
        print(
            f"{name:<13} {s.metrics.l1_mean_abs:>12.6f} {s.metrics.l2_euclidean:>12.4f}  {non_target}"
        )

    finals = [results[n][0].values for n in strategies]
    if args.iters == 0 or all(np.array_equal(finals[0], f) for f in finals[1:]):
        print("warning: degenerate comparison, all strategies returned the same direction")
        return 0

    l1 = {n: by_name[n].metrics.l1_mean_abs for n in strategies}
    l2 = {n: by_name[n].metrics.l2_euclidean for n in strategies}
    hard_leak = by_name["hard_mask"].metrics.leakage
    checks = [
        ("l1: hard_mask < l1_prox", l1["hard_mask"] < l1["l1_prox"]),
        ("l1: l1_prox < l2_penalty", l1["l1_prox"] < l1["l2_penalty"]),
        ("l2: hard_mask < l2_penalty", l2["hard_mask"] < l2["l2_penalty"]),
        (
            "hard_mask leakage exactly zero",
            all(v == 0.0 for a, v in hard_leak.items() if a != bench.target_attribute),
        ),
    ]
    for label, ok in checks:
        print(f"check {'passed' if ok else 'FAILED'}: {label}")
    failed = [label for label, ok in checks if not ok]
    if failed:
        print(f"assertion failed: {'; '.join(failed)}", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentedit",
        description="Disentangled editing of 18x512 W+ latent codes with sparse layer constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-fixtures", help="write a deterministic latent/mapper/generator fixture set")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_fixtures)

    p = sub.add_parser("edit", help="apply mapper-predicted edits to a latent archive")
    p.add_argument("--latents", required=True, help="input NPY archive")
    p.add_argument("--mapper", required=True, help="LFMAP1 mapper weight file")
    p.add_argument("--out-latents", required=True, help="output NPY archive")
    p.add_argument("--out-metrics", required=True, help="output metrics JSON")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--edit-factor", type=float, default=3.0)
    p.add_argument("--strategy", choices=["dense", "l1-prox", "hard-mask"], default="dense")
    p.add_argument("--lam", type=float, default=0.01, help="l1-prox shrinkage")
    p.add_argument("--mask", default="4-7", help="active layer ranges, e.g. 4-7 or 0,4-8")
    p.add_argument("--dtype", choices=["f32", "f64"], default=None, help="output width (default: keep)")
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("compare", help="run the three strategies on the leakage benchmark")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mu", type=float, default=0.01, help="l2 penalty weight")
    p.add_argument("--lam", type=float, default=0.01, help="l1 prox weight")
    p.add_argument("--step", type=float, default=0.05, help="gradient step size")
    p.add_argument("--iters", type=int, default=500)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LatentEditError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
