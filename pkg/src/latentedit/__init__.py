"""Disentangled editing of hierarchical W+ latent codes.

Edits an 18x512 latent code by a mapper-predicted direction under one of
three regularization regimes (dense, l1-proximal, hard layer masking) and
quantifies the result: sparsity and magnitude norms, per-layer change
traces, and attribute leakage against a synthetic generator whose
attribute-to-layer coupling is known exactly.
"""

from .core import (
    LATENT_SHAPE,
    NUM_CHANNELS,
    NUM_ENTRIES,
    NUM_LAYERS,
    ULTRA_STRICT_MASK,
    Dense,
    EditConfig,
    EditDirection,
    HardMask,
    L1Prox,
    LatentCode,
    LayerMask,
    apply_edit,
    mask_direction,
    transform_direction,
)
from .errors import (
    BenchmarkConstructionError,
    ConfigError,
    LatentEditError,
    MapperFormatError,
    NonFiniteError,
    NpyFormatError,
    OptimizationError,
    ShapeMismatchError,
)
from .mapper import (
    AffineLayer,
    MapperGroup,
    MapperModel,
    load_mapper,
    mapper_forward,
    write_mapper,
)
from .metrics import (
    REFERENCE_FULL_SCALE,
    ComparisonReport,
    EditMetrics,
    compare_strategies,
    compute_metrics,
    per_layer_csv,
    trace_to_csv,
)
from .npyio import LatentArchive, NpyHeader, read_npy, write_npy
from .optim import (
    L2Penalty,
    Objective,
    OptimizerConfig,
    TraceEntry,
    finite_difference_gradient,
    optimize_direction,
    sample_coords,
    soft_threshold,
)
from .oracle import (
    CANONICAL_ATTRIBUTES,
    CANONICAL_SUPPORTS,
    LeakageBenchmark,
    ToyGenerator,
    attribute_scores,
    canonical_generator,
    leakage_report,
    make_benchmark,
)

__version__ = "0.1.0"
