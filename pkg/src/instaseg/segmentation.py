"""Thresholding, area-filtered component labeling, and the instance splitting pipeline.

The pipeline runs, in order: Lanczos resize to the target dimensions,
quantization to 8 bits, grayscale opening, sharpening, repeated grayscale
erosion, Otsu thresholding, and connected-component labeling with an area
threshold.  ``InstanceSplitter`` wraps it in an estimator API so it composes
with scikit-learn tooling.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import io as raster_io
from .morphology import erode, lanczos_resize, opening, sharpen
from .raster import quantize
from .validation import (
    check_binary_mask,
    check_connectivity,
    check_gray_image,
    check_label_map,
    check_prob_map,
    check_se_size,
)


@dataclass(frozen=True)
class OtsuResult:
    """Threshold maximizing between-class variance; pixels > threshold are foreground."""

    threshold: int
    between_class_variance: float
    degenerate: bool


def otsu_from_histogram(hist) -> OtsuResult:
    """Exhaustive Otsu scan over a 256-bin histogram.

    Evaluates ``w0(t) * w1(t) * (mu0(t) - mu1(t))**2`` for every candidate
    threshold with class 0 holding pixels <= t.  The comparison is done in
    exact integer arithmetic, and ties go to the smallest threshold.
    """
    h = np.asarray(hist)
    if h.shape != (256,) or not np.issubdtype(h.dtype, np.integer) or h.min() < 0:
        raise ValueError("histogram must be 256 non-negative integer counts")
    counts = [int(c) for c in h]
    n = sum(counts)
    if n == 0 or sum(1 for c in counts if c > 0) <= 1:
        return OtsuResult(threshold=0, between_class_variance=0.0, degenerate=True)

    total_sum = sum(i * c for i, c in enumerate(counts))
    # sigma_b^2(t) = (s*n - S*c)^2 / (n^2 * c * (n - c)); compare the
    # n-independent ratio as exact integer cross products.
    best_t, best_num, best_den = 0, 0, 1
    c = s = 0
    for t in range(256):
        c += counts[t]
        s += t * counts[t]
        den = c * (n - c)
        num = (s * n - total_sum * c) ** 2 if den else 0
        if den == 0:
            den = 1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    variance = best_num / best_den / (n * n)
    return OtsuResult(threshold=best_t, between_class_variance=variance, degenerate=False)


def otsu_threshold(image) -> OtsuResult:
    """Otsu's method on an 8-bit image; degenerate for single-valued images."""
    img = check_gray_image(image)
    return otsu_from_histogram(np.bincount(img.ravel(), minlength=256))


def binarize_fixed(prob_map, level: float = 0.2) -> np.ndarray:
    """Binarize a probability map at a fixed level; values >= level are foreground."""
    if not 0.0 <= level <= 1.0:
        raise ValueError(f"threshold level must lie in [0, 1], got {level}")
    return check_prob_map(prob_map) >= np.float32(level)


def label_components(mask, min_area: int = 0, connectivity: int = 8) -> np.ndarray:
    """Label connected foreground components with at least ``min_area`` pixels.

    Surviving components get labels 1..K in order of their first pixel in a
    row-major scan; smaller components become background.
    """
    m = check_binary_mask(mask)
    connectivity = check_connectivity(connectivity)
    if min_area < 0:
        raise ValueError(f"min_area must be >= 0, got {min_area}")
    height, width = m.shape

    parent: list[int] = []
    run_row: list[int] = []
    run_span: list[tuple[int, int]] = []

    def find(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    diagonal = connectivity == 8
    prev_runs: list[tuple[int, int, int]] = []
    edges = np.zeros(width + 2, dtype=np.int8)
    for r in range(height):
        edges[1:-1] = m[r]
        bounds = np.flatnonzero(np.diff(edges))
        cur_runs = []
        j = 0
        for a, b in zip(bounds[0::2], bounds[1::2]):
            rid = len(parent)
            parent.append(rid)
            run_row.append(r)
            run_span.append((int(a), int(b)))
            # Two-pointer sweep over the previous row's runs.
            while j < len(prev_runs) and (prev_runs[j][1] < a if diagonal else prev_runs[j][1] <= a):
                j += 1
            k = j
            while k < len(prev_runs) and (prev_runs[k][0] <= b if diagonal else prev_runs[k][0] < b):
                ra, rb = find(rid), find(prev_runs[k][2])
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
                k += 1
            cur_runs.append((int(a), int(b), rid))
        prev_runs = cur_runs

    area: dict[int, int] = {}
    first_run: dict[int, int] = {}
    for rid, (a, b) in enumerate(run_span):
        root = find(rid)
        area[root] = area.get(root, 0) + (b - a)
        if root not in first_run:
            first_run[root] = rid

    label_of: dict[int, int] = {}
    for root in sorted(first_run, key=first_run.get):
        if area[root] >= min_area:
            label_of[root] = len(label_of) + 1

    out = np.zeros((height, width), dtype=np.int32)
    for rid, (a, b) in enumerate(run_span):
        label = label_of.get(find(rid), 0)
        if label:
            out[run_row[rid], a:b] = label
    return out


def count_instances(label_map) -> int:
    """Number of distinct positive labels in a contiguously-labeled map."""
    return int(check_label_map(label_map).max(initial=0))


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs of the splitting pipeline; defaults follow the reference recipe."""

    se_size: int = 5
    erosion_passes: int = 2
    min_area: int = 2000
    connectivity: int = 8
    target_w: int | None = None
    target_h: int | None = None

    def __post_init__(self):
        check_se_size(self.se_size)
        check_connectivity(self.connectivity)
        if self.erosion_passes < 0:
            raise ValueError(f"erosion_passes must be >= 0, got {self.erosion_passes}")
        if self.min_area < 0:
            raise ValueError(f"min_area must be >= 0, got {self.min_area}")
        for name in ("target_w", "target_h"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")


@dataclass(frozen=True)
class SplitResult:
    labels: np.ndarray
    n_instances: int
    degenerate: bool
    threshold: int


def split_instances(prob_map, config: PipelineConfig | None = None, *, trace_dir=None) -> SplitResult:
    """Run the full splitting pipeline on a probability map.

    With ``trace_dir`` set, every intermediate stage is written there as a
    PGM file (``01_resized`` through ``NN_labels``) for golden-file testing
    and visual inspection.
    """
    cfg = config or PipelineConfig()
    p = check_prob_map(prob_map)
    target_w = cfg.target_w or p.shape[1]
    target_h = cfg.target_h or p.shape[0]

    stages: list[tuple[str, np.ndarray]] = []
    gray = quantize(lanczos_resize(p, target_w, target_h))
    stages.append(("resized", gray))
    gray = opening(gray, cfg.se_size)
    stages.append(("opened", gray))
    gray = sharpen(gray)
    stages.append(("sharpened", gray))
    for i in range(cfg.erosion_passes):
        gray = erode(gray, cfg.se_size)
        stages.append((f"eroded{i + 1}", gray))

    otsu = otsu_threshold(gray)
    if otsu.degenerate:
        mask = np.zeros(gray.shape, dtype=bool)
    else:
        mask = gray > otsu.threshold
    stages.append(("binary", (mask * np.uint8(255))))
    labels = label_components(mask, cfg.min_area, cfg.connectivity)

    if trace_dir is not None:
        trace_dir = Path(trace_dir)
        os.makedirs(trace_dir, exist_ok=True)
        for i, (name, img) in enumerate(stages, start=1):
            raster_io.write_gray(img, trace_dir / f"{i:02d}_{name}.pgm")
        raster_io.write_label(labels, trace_dir / f"{len(stages) + 1:02d}_labels.pgm")

    return SplitResult(
        labels=labels,
        n_instances=count_instances(labels),
        degenerate=otsu.degenerate,
        threshold=otsu.threshold,
    )


def _as_map_batch(X):
    """Normalize estimator input to (list of 2-D maps, was_single flag)."""
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [X], True
    if isinstance(X, np.ndarray) and X.ndim == 3:
        return list(X), False
    return list(X), False


class InstanceSplitter(BaseEstimator, TransformerMixin):
    """Estimator wrapper around :func:`split_instances`.

    Stateless: ``fit`` only validates parameters.  ``transform`` maps
    probability maps to instance label maps, ``predict`` to instance counts.
    A single 2-D array yields a single result; a sequence (or 3-D stack)
    yields a list / array of results.
    """

    def __init__(self, se_size=5, erosion_passes=2, min_area=2000, connectivity=8,
                 target_w=None, target_h=None):
        self.se_size = se_size
        self.erosion_passes = erosion_passes
        self.min_area = min_area
        self.connectivity = connectivity
        self.target_w = target_w
        self.target_h = target_h

    def _config(self) -> PipelineConfig:
        return PipelineConfig(
            se_size=self.se_size,
            erosion_passes=self.erosion_passes,
            min_area=self.min_area,
            connectivity=self.connectivity,
            target_w=self.target_w,
            target_h=self.target_h,
        )

    def fit(self, X=None, y=None):
        self._config()
        self.is_fitted_ = True
        return self

    def transform(self, X):
        cfg = self._config()
        maps, single = _as_map_batch(X)
        labels = [split_instances(m, cfg).labels for m in maps]
        return labels[0] if single else labels

    def predict(self, X):
        cfg = self._config()
        maps, single = _as_map_batch(X)
        counts = [split_instances(m, cfg).n_instances for m in maps]
        return counts[0] if single else np.asarray(counts)


class ThresholdSplitter(BaseEstimator, TransformerMixin):
    """Baseline without morphology: fixed-level binarization plus labeling."""

    def __init__(self, level=0.2, min_area=0, connectivity=8):
        self.level = level
        self.min_area = min_area
        self.connectivity = connectivity

    def fit(self, X=None, y=None):
        self.is_fitted_ = True
        return self

    def transform(self, X):
        maps, single = _as_map_batch(X)
        labels = [
            label_components(binarize_fixed(m, self.level), self.min_area, self.connectivity)
            for m in maps
        ]
        return labels[0] if single else labels

    def predict(self, X):
        maps, single = _as_map_batch(X)
        counts = [count_instances(lbl) for lbl in (self.transform(m) for m in maps)]
        return counts[0] if single else np.asarray(counts)
