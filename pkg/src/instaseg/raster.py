"""Conversions between the floating-point and 8-bit raster domains."""

from __future__ import annotations

import numpy as np

from .validation import check_label_map, check_prob_map


def quantize(prob_map) -> np.ndarray:
    """Map a probability map to an 8-bit gray image.

    Each value ``v`` becomes ``round(v * 255)`` with ties rounded half-up,
    so quantization is monotone and deterministic across platforms.
    """
    p = check_prob_map(prob_map)
    # float64 is exact for (24-bit float) * 255 + 0.5, so floor == half-up.
    return np.floor(p.astype(np.float64) * 255.0 + 0.5).astype(np.uint8)


def labels_to_mask(label_map) -> np.ndarray:
    """Flatten an instance label map to a binary foreground mask."""
    return check_label_map(label_map) > 0
