"""Export network probability maps in the PMAP wire format."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .config import NetConfig
from .data import IMAGE_SUFFIXES, _load_gray
from .model import build_model
from .pmap import write_pmap


def predict_pmap(model, image: np.ndarray) -> np.ndarray:
    """Forward one (H, W) image; returns a float32 map clipped to [0, 1]."""
    batch = image[None, ..., None].astype(np.float32)
    out = model.predict(batch, verbose=0)[0, ..., 0]
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def export_pmaps(weights_path, images_dir, out_dir, net: NetConfig | None = None) -> list[Path]:
    """Run inference over a directory of images and write one PMAP per image."""
    net = net or NetConfig()
    model = build_model(net)
    model.load_weights(weights_path)
    images_dir = Path(images_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for path in sorted(images_dir.iterdir()):
        if path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        image = _load_gray(path, net.input_size, is_mask=False)
        target = out / f"{path.stem}.pmap"
        write_pmap(predict_pmap(model, image), target)
        written.append(target)
    if not written:
        raise ValueError(f"no images found under {images_dir}")
    return written
