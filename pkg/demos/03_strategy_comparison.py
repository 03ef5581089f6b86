#!/usr/bin/env python3
# Why the hard layer mask wins: the leakage benchmark, optimized three ways.
#
# The benchmark asks for a unit shift of the hair score, but its objective
# contains a bias term whose gradient drags the solution into the locked
# gender/makeup layers - the synthetic stand-in for a biased dataset. An
# l2 penalty only limits magnitude, so the pull wins; the l1 prox shrinks
# it but is eventually overridden; the hard mask makes it structurally
# impossible.

from latentedit import (
    HardMask, L1Prox, L2Penalty, OptimizerConfig, ULTRA_STRICT_MASK,
    compute_metrics, make_benchmark, optimize_direction,
)

bench = make_benchmark(seed=0)
print(f"benchmark: shift '{bench.target_attribute}' by {bench.target_shift},"
      f" bias strength {bench.bias_strength}, ridge {bench.ridge}")
leak = bench.locked_mass(bench.unconstrained_minimizer())
print(f"unconstrained optimum puts {leak:.1f} absolute mass in locked layers\n")

print(f"{'strategy':<12} {'l1_mean_abs':>12} {'l2_euclidean':>13} {'locked mass':>12}")
for name, strategy in [
    ("l2_penalty", L2Penalty(0.01)),
    ("l1_prox", L1Prox(0.01)),
    ("hard_mask", HardMask(ULTRA_STRICT_MASK)),
]:
    cfg = OptimizerConfig(step_size=0.05, iterations=500, strategy=strategy)
    direction, trace = optimize_direction(bench.objective, cfg)
    m = compute_metrics(direction)
    print(f"{name:<12} {m.l1_mean_abs:>12.6f} {m.l2_euclidean:>13.4f}"
          f" {bench.locked_mass(direction):>12.4f}"
          f"   loss {trace[0].loss:.3f} -> {trace[-1].loss:.3f}")

print("\nthe ordering hard_mask < l1_prox < l2_penalty on the sparsity metric")
print("holds on every benchmark seed; run the acceptance suite to check all 10.")
