"""Instance separation of segmentation probability maps via grayscale morphology.

The package turns per-pixel foreground probabilities into separated object
instances (resample, open, sharpen, erode, Otsu, connected components),
evaluates segmentation and counting quality, and generates synthetic
phantoms with known ground truth for verification.
"""

from .io import (
    BadMagicError,
    DimensionError,
    FormatError,
    HeaderError,
    MaxvalError,
    TruncatedFileError,
    ValueRangeError,
    read_gray,
    read_label,
    read_pmap,
    write_gray,
    write_label,
    write_pmap,
)
from .metrics import (
    METRIC_NAMES,
    ConfusionCounts,
    FoldAggregate,
    MetricsReport,
    WilcoxonResult,
    aggregate_folds,
    compute_metrics,
    confusion,
    mape,
    wilcoxon_signed_rank,
)
from .morphology import SHARPEN_KERNEL, dilate, erode, lanczos_resize, opening, sharpen
from .phantom import PhantomPair, PhantomSpec, Xorshift64Star
from .phantom import generate as generate_phantom
from .raster import labels_to_mask, quantize
from .segmentation import (
    InstanceSplitter,
    OtsuResult,
    PipelineConfig,
    SplitResult,
    ThresholdSplitter,
    binarize_fixed,
    count_instances,
    label_components,
    otsu_from_histogram,
    otsu_threshold,
    split_instances,
)

__version__ = "0.1.0"

__all__ = [
    "BadMagicError",
    "ConfusionCounts",
    "DimensionError",
    "FoldAggregate",
    "FormatError",
    "HeaderError",
    "InstanceSplitter",
    "MaxvalError",
    "METRIC_NAMES",
    "MetricsReport",
    "OtsuResult",
    "PhantomPair",
    "PhantomSpec",
    "PipelineConfig",
    "SHARPEN_KERNEL",
    "SplitResult",
    "ThresholdSplitter",
    "TruncatedFileError",
    "ValueRangeError",
    "WilcoxonResult",
    "Xorshift64Star",
    "aggregate_folds",
    "binarize_fixed",
    "compute_metrics",
    "confusion",
    "count_instances",
    "dilate",
    "erode",
    "generate_phantom",
    "label_components",
    "labels_to_mask",
    "lanczos_resize",
    "mape",
    "opening",
    "otsu_from_histogram",
    "otsu_threshold",
    "quantize",
    "read_gray",
    "read_label",
    "read_pmap",
    "sharpen",
    "split_instances",
    "wilcoxon_signed_rank",
    "write_gray",
    "write_label",
    "write_pmap",
]
