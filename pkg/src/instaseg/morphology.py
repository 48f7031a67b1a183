"""Flat grayscale morphology, sharpening, and Lanczos resampling.

All morphological operations use a flat square structuring element.  Out of
bounds samples take the operation's identity element (255 for erosion, 0
for dilation), so image borders never fabricate extrema.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .validation import check_gray_image, check_prob_map, check_se_size

# 3x3 sharpening kernel; coefficients sum to 1 so constant regions are preserved.
SHARPEN_KERNEL = np.array([[-1, -1, -1], [-1, 9, -1], [-1, -1, -1]], dtype=np.int32)

LANCZOS_WINDOW = 3


def _window_extreme_1d(img: np.ndarray, size: int, axis: int, pad_value: int, reduce) -> np.ndarray:
    radius = size // 2
    if radius == 0:
        return img
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(img, pad, mode="constant", constant_values=pad_value)
    return reduce(sliding_window_view(padded, size, axis=axis), -1)


def erode(image, size: int = 5) -> np.ndarray:
    """Grayscale erosion: per-pixel minimum over a flat ``size x size`` square."""
    img = check_gray_image(image)
    size = check_se_size(size)
    out = _window_extreme_1d(img, size, 0, 255, np.ndarray.min)
    return _window_extreme_1d(out, size, 1, 255, np.ndarray.min)


def dilate(image, size: int = 5) -> np.ndarray:
    """Grayscale dilation: per-pixel maximum over a flat ``size x size`` square."""
    img = check_gray_image(image)
    size = check_se_size(size)
    out = _window_extreme_1d(img, size, 0, 0, np.ndarray.max)
    return _window_extreme_1d(out, size, 1, 0, np.ndarray.max)


def opening(image, size: int = 5) -> np.ndarray:
    """Grayscale opening (erosion then dilation); removes bright details smaller than the element."""
    return dilate(erode(image, size), size)


def sharpen(image) -> np.ndarray:
    """Sharpen with the 3x3 kernel, replicate borders, saturate to [0, 255].

    The convolution is accumulated in wide integers before saturation.
    """
    img = check_gray_image(image)
    p = np.pad(img, 1, mode="edge").astype(np.int32)
    acc = 9 * p[1:-1, 1:-1] - (
        p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
        + p[1:-1, :-2] + p[1:-1, 2:]
        + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:]
    )
    return np.clip(acc, 0, 255).astype(np.uint8)


def _lanczos_kernel(x: np.ndarray, a: int) -> np.ndarray:
    # Snap near-integer offsets so identity-scale resampling is exact:
    # the kernel is 1 at 0 and exactly 0 at other integers.
    nearest = np.rint(x)
    is_integer = np.abs(x - nearest) < 1e-12
    k = np.sinc(x) * np.sinc(x / a)
    k = np.where(np.abs(x) >= a, 0.0, k)
    return np.where(is_integer, np.where(nearest == 0.0, 1.0, 0.0), k)


def _resample_axis(arr: np.ndarray, out_len: int, axis: int, a: int) -> np.ndarray:
    in_len = arr.shape[axis]
    scale = in_len / out_len
    src = (np.arange(out_len) + 0.5) * scale - 0.5
    base = np.floor(src).astype(np.int64)
    taps = np.arange(-a + 1, a + 1)
    idx = base[:, None] + taps[None, :]
    weights = _lanczos_kernel(src[:, None] - idx, a)
    inside = (idx >= 0) & (idx < in_len)
    weights = np.where(inside, weights, 0.0)
    idx = np.clip(idx, 0, in_len - 1)
    weights /= weights.sum(axis=1, keepdims=True)

    moved = np.moveaxis(arr, axis, 0)
    out = np.zeros((out_len,) + moved.shape[1:], dtype=np.float64)
    for k in range(2 * a):
        out += weights[:, k].reshape((-1,) + (1,) * (moved.ndim - 1)) * moved[idx[:, k]]
    return np.moveaxis(out, 0, axis)


def lanczos_resize(image, out_w: int, out_h: int, a: int = LANCZOS_WINDOW) -> np.ndarray:
    """Separable Lanczos resample to ``out_w x out_h``.

    Output pixel centers map back to source coordinates as
    ``src = (dst + 0.5) * (in / out) - 0.5``; only in-bounds source pixels
    contribute and their weights are renormalized to sum to 1, so constant
    images are preserved at every scale.  Gray images are rounded half-up
    back to uint8; probability maps are clamped to [0, 1].
    """
    out_w, out_h = int(out_w), int(out_h)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"target dimensions must be >= 1, got {out_w}x{out_h}")
    arr = np.asarray(image)
    is_gray = not np.issubdtype(arr.dtype, np.floating)
    if is_gray:
        work = check_gray_image(arr).astype(np.float64)
    else:
        work = check_prob_map(arr).astype(np.float64)
    work = _resample_axis(work, out_h, 0, a)
    work = _resample_axis(work, out_w, 1, a)
    if is_gray:
        return np.floor(np.clip(work, 0.0, 255.0) + 0.5).astype(np.uint8)
    return np.clip(work, 0.0, 1.0).astype(np.float32)
