#!/usr/bin/env python3
# Editing a W+ latent code under the three strategies.
#
# A latent code is an 18x512 matrix: 18 style layers, 512 channels each.
# The update rule is w_new = w + alpha * edit_factor * d', where d' is the
# raw direction after the strategy's transform.

import numpy as np

from latentedit import (
    Dense, EditConfig, EditDirection, HardMask, L1Prox, LatentCode,
    ULTRA_STRICT_MASK, apply_edit,
)

rng = np.random.default_rng(0)
w = LatentCode(rng.standard_normal((18, 512)))      # a code to edit
d = EditDirection(rng.standard_normal((18, 512)))   # a predicted direction

# Dense: the direction is applied on every layer.
dense = apply_edit(w, d, EditConfig(alpha=0.1, edit_factor=3.0, strategy=Dense()))
print("dense edit:     all 18 layers moved,",
      f"max |change| = {np.abs(dense.values - w.values).max():.4f}")

# L1-prox: small entries of the direction are snapped to zero first.
shrunk = apply_edit(w, d, EditConfig(strategy=L1Prox(0.8)))
moved = np.abs(shrunk.values - w.values) > 0
print(f"l1-prox edit:   {moved.mean():.1%} of entries moved (soft sparsity)")

# Hard mask: layers outside the active set cannot move at all. The
# ultra-strict mask keeps only the medium layers 4-7 active.
masked = apply_edit(w, d, EditConfig(strategy=HardMask(ULTRA_STRICT_MASK)))
locked = sorted(ULTRA_STRICT_MASK.locked)
print("hard-mask edit: locked rows bit-identical?",
      masked.values[locked].tobytes() == w.values[locked].tobytes())
print("                active rows moved?",
      bool((masked.values[4:8] != w.values[4:8]).any()))

# Zero edit strength is the exact identity, whatever the strategy.
frozen = apply_edit(w, d, EditConfig(edit_factor=0.0))
print("edit_factor=0:  output equals input exactly?",
      np.array_equal(frozen.values, w.values))
