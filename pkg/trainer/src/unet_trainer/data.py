"""Dataset loading from paired image/mask directories.

Expected layout::

    <data_dir>/images/       input grayscale images
    <data_dir>/masks_full/   one-blob-per-scene masks, matching stems
    <data_dir>/masks_split/  masks with gaps between object instances

Images are resized to the network input size and normalized to [0, 1];
masks are binarized after resizing.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_SUFFIXES = (".png", ".pgm", ".bmp", ".tif", ".tiff", ".jpg", ".jpeg")


def _load_gray(path: Path, size: int, *, is_mask: bool) -> np.ndarray:
    img = Image.open(path).convert("L")
    resample = Image.NEAREST if is_mask else Image.LANCZOS
    img = img.resize((size, size), resample=resample)
    arr = np.asarray(img, dtype=np.float32) / 255.0
    if is_mask:
        arr = (arr >= 0.5).astype(np.float32)
    return arr


def list_stems(data_dir) -> list[str]:
    image_dir = Path(data_dir) / "images"
    if not image_dir.is_dir():
        raise FileNotFoundError(f"missing images directory: {image_dir}")
    stems = sorted(p.stem for p in image_dir.iterdir()
                   if p.suffix.lower() in IMAGE_SUFFIXES)
    if not stems:
        raise ValueError(f"no images found under {image_dir}")
    return stems


def _find(directory: Path, stem: str) -> Path:
    for suffix in IMAGE_SUFFIXES:
        candidate = directory / f"{stem}{suffix}"
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"no file for stem {stem!r} under {directory}")


def load_pairs(data_dir, mask_kind: str, size: int):
    """Load (images, masks, stems); raises on missing or mismatched pairs."""
    if mask_kind not in ("full", "split"):
        raise ValueError(f"mask_kind must be 'full' or 'split', got {mask_kind!r}")
    root = Path(data_dir)
    mask_dir = root / f"masks_{mask_kind}"
    if not mask_dir.is_dir():
        raise FileNotFoundError(f"missing mask directory: {mask_dir}")
    stems = list_stems(root)
    images, masks = [], []
    for stem in stems:
        images.append(_load_gray(_find(root / "images", stem), size, is_mask=False))
        masks.append(_load_gray(_find(mask_dir, stem), size, is_mask=True))
    x = np.stack(images)[..., None]
    y = np.stack(masks)[..., None]
    return x, y, stems


def fold_split(n: int, folds: int, fold: int):
    """Deterministic round-robin cross-validation split."""
    if not 0 <= fold < folds:
        raise ValueError(f"fold must lie in [0, {folds}), got {fold}")
    indices = np.arange(n)
    val = indices[fold::folds]
    train = np.setdiff1d(indices, val)
    return train, val
