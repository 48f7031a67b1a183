"""Pixel-wise segmentation metrics, count-error MAPE, and the exact Wilcoxon signed-rank test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import check_binary_mask

METRIC_NAMES = ("sensitivity", "specificity", "ppv", "npv", "jaccard", "dice")

# Largest effective sample size for which the exact null distribution is used.
EXACT_LIMIT = 25


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    """The six pixel-wise ratios; ``None`` marks an undefined (0/0) metric."""

    sensitivity: float | None
    specificity: float | None
    ppv: float | None
    npv: float | None
    jaccard: float | None
    dice: float | None

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}

    def as_csv_row(self) -> str:
        return ",".join("" if getattr(self, n) is None else repr(getattr(self, n)) for n in METRIC_NAMES)


def confusion(pred, truth) -> ConfusionCounts:
    """Pixel-wise confusion counts between a predicted and a true mask."""
    p = check_binary_mask(pred)
    t = check_binary_mask(truth)
    if p.shape != t.shape:
        raise ValueError(f"mask dimensions differ: {p.shape} vs {t.shape}")
    tp = int(np.count_nonzero(p & t))
    fp = int(np.count_nonzero(p & ~t))
    fn = int(np.count_nonzero(~p & t))
    tn = p.size - tp - fp - fn
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def compute_metrics(c: ConfusionCounts) -> MetricsReport:
    """Sensitivity, specificity, PPV, NPV, Jaccard, and Dice from confusion counts."""
    return MetricsReport(
        sensitivity=_ratio(c.tp, c.tp + c.fn),
        specificity=_ratio(c.tn, c.tn + c.fp),
        ppv=_ratio(c.tp, c.tp + c.fp),
        npv=_ratio(c.tn, c.tn + c.fn),
        jaccard=_ratio(c.tp, c.tp + c.fp + c.fn),
        dice=_ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn),
    )


def mape(actual, predicted) -> float:
    """Mean absolute percentage error between paired counts, in percent.

    Every actual count must be >= 1 (a zero actual makes the percentage
    undefined).
    """
    a = np.asarray(actual, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if a.ndim != 1 or a.shape != p.shape or a.size < 1:
        raise ValueError("actual and predicted must be equal-length non-empty 1-D series")
    if a.min() < 1:
        raise ValueError("every actual count must be >= 1")
    if p.min() < 0:
        raise ValueError("predicted counts must be >= 0")
    return float(np.mean(np.abs(a - p) / np.abs(a)) * 100.0)


@dataclass(frozen=True)
class WilcoxonResult:
    w_statistic: float
    n_effective: int
    p_two_sided: float
    method: str  # "exact" or "normal-approx"
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "w_statistic": self.w_statistic,
            "n_effective": self.n_effective,
            "p_two_sided": self.p_two_sided,
            "method": self.method,
            "degenerate": self.degenerate,
        }


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_values = values[order]
    i = 0
    while i < values.size:
        j = i
        while j < values.size and sorted_values[j] == sorted_values[i]:
            j += 1
        ranks[order[i:j]] = (i + j + 1) / 2.0  # average of ranks i+1..j
        i = j
    return ranks


def _exact_tail_count(doubled_ranks: list[int], doubled_w: int) -> int:
    """Number of sign assignments with doubled positive-rank sum <= doubled_w."""
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled_ranks:
        for s in range(total, r - 1, -1):
            if counts[s - r]:
                counts[s] += counts[s - r]
    return sum(counts[: doubled_w + 1])


def wilcoxon_signed_rank(a, b) -> WilcoxonResult:
    """Paired two-sided Wilcoxon signed-rank test.

    Zero differences are discarded before ranking; ties in the absolute
    differences receive average ranks.  The statistic is
    ``W = min(W+, W-)``.  For ``n_effective <= 25`` the two-sided p-value is
    exact over all ``2**n`` sign assignments; above that a normal
    approximation with tie correction is used.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape or x.size < 1:
        raise ValueError("series must be equal-length non-empty 1-D arrays")
    d = x - y
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return WilcoxonResult(w_statistic=0.0, n_effective=0, p_two_sided=1.0,
                              method="exact", degenerate=True)

    ranks = _average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if n <= EXACT_LIMIT:
        doubled = [int(round(2.0 * r)) for r in ranks]
        tail = _exact_tail_count(doubled, int(round(2.0 * w)))
        # The null distribution of W+ is symmetric, so both tails have equal mass.
        p = min(1.0, 2.0 * tail / (1 << n))
        return WilcoxonResult(w_statistic=w, n_effective=n, p_two_sided=p, method="exact")

    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    variance -= float(np.sum(tie_counts.astype(np.float64) ** 3 - tie_counts)) / 48.0
    z = (w - mean) / math.sqrt(variance)
    p = min(1.0, math.erfc(-z / math.sqrt(2.0)))
    return WilcoxonResult(w_statistic=w, n_effective=n, p_two_sided=p, method="normal-approx")


@dataclass(frozen=True)
class FoldAggregate:
    """Mean and sample standard deviation of one metric across folds."""

    mean: float | None
    std: float | None
    n_used: int
    n_skipped: int

    def as_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "n_used": self.n_used, "n_skipped": self.n_skipped}


def aggregate_folds(reports) -> dict[str, FoldAggregate]:
    """Per-metric mean and sample (n-1) standard deviation over fold reports.

    Undefined entries are skipped and counted in ``n_skipped``.
    """
    reports = list(reports)
    if len(reports) < 2:
        raise ValueError("aggregation needs at least 2 folds")
    out = {}
    for name in METRIC_NAMES:
        values = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        n = len(values)
        if n == 0:
            out[name] = FoldAggregate(None, None, 0, len(reports))
            continue
        mean = sum(values) / n
        std = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1)) if n >= 2 else None
        out[name] = FoldAggregate(mean, std, n, len(reports) - n)
    return out
