"""Input validation helpers shared across the package.

Array conventions used everywhere:

* probability map -- 2-D ``float32`` array with values in ``[0, 1]``
* gray image      -- 2-D ``uint8`` array
* binary mask     -- 2-D ``bool`` array
* label map       -- 2-D ``int32`` array, 0 is background, positive values
  are instance labels forming a contiguous range ``1..n``

All checkers return a validated (and possibly cast) C-contiguous array and
raise ``ValueError`` on contract violations.
"""

from __future__ import annotations

import numpy as np


def _as_2d(arr, name: str) -> np.ndarray:
    a = np.asarray(arr)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must have at least one pixel per axis, got {a.shape}")
    return a


def check_prob_map(arr) -> np.ndarray:
    """Validate a probability map: 2-D, finite, every value in [0, 1]."""
    a = _as_2d(arr, "probability map")
    if not np.issubdtype(a.dtype, np.floating):
        a = a.astype(np.float32)
    if not np.all(np.isfinite(a)):
        raise ValueError("probability map contains non-finite values")
    if a.min() < 0.0 or a.max() > 1.0:
        raise ValueError("probability map values must lie in [0, 1]")
    return np.ascontiguousarray(a, dtype=np.float32)


def check_gray_image(arr) -> np.ndarray:
    """Validate an 8-bit gray image: 2-D integers in [0, 255]."""
    a = _as_2d(arr, "gray image")
    if a.dtype == np.uint8:
        return np.ascontiguousarray(a)
    if not np.issubdtype(a.dtype, np.integer):
        raise ValueError(f"gray image must have an integer dtype, got {a.dtype}")
    if a.min() < 0 or a.max() > 255:
        raise ValueError("gray image values must lie in [0, 255]")
    return np.ascontiguousarray(a, dtype=np.uint8)


def check_binary_mask(arr) -> np.ndarray:
    """Validate a binary mask; integer arrays of 0/1 are accepted."""
    a = _as_2d(arr, "binary mask")
    if a.dtype == np.bool_:
        return np.ascontiguousarray(a)
    if np.issubdtype(a.dtype, np.integer):
        if np.any((a != 0) & (a != 1)):
            raise ValueError("binary mask integers must be 0 or 1")
        return np.ascontiguousarray(a, dtype=bool)
    raise ValueError(f"binary mask must be bool or 0/1 integers, got {a.dtype}")


def check_label_map(arr, *, contiguous: bool = False) -> np.ndarray:
    """Validate a label map: 2-D non-negative integers.

    With ``contiguous=True`` additionally require the positive labels to be
    exactly ``{1, ..., max}``.
    """
    a = _as_2d(arr, "label map")
    if not np.issubdtype(a.dtype, np.integer):
        raise ValueError(f"label map must have an integer dtype, got {a.dtype}")
    if a.min() < 0:
        raise ValueError("label map values must be non-negative")
    if contiguous:
        present = np.unique(a)
        positive = present[present > 0]
        if positive.size and (positive[0] != 1 or positive[-1] != positive.size):
            raise ValueError("label map labels are not contiguous from 1")
    return np.ascontiguousarray(a, dtype=np.int32)


def check_se_size(size) -> int:
    """Validate a flat square structuring element side length (odd, >= 1)."""
    s = int(size)
    if s != size or s < 1 or s % 2 == 0:
        raise ValueError(f"structuring element size must be an odd integer >= 1, got {size}")
    return s


def check_connectivity(connectivity) -> int:
    c = int(connectivity)
    if c not in (4, 8):
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    return c
