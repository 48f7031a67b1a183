"""Probability-map wire format shared with the splitting pipeline.

Layout: magic ``PMAP``, width and height as little-endian u32, then
``width * height`` binary32 little-endian values, row-major, top-left
origin, every value in [0, 1].
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"PMAP"


def write_pmap(array, path) -> None:
    a = np.asarray(array, dtype=np.float32)
    if a.ndim != 2:
        raise ValueError(f"probability map must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or a.min() < 0.0 or a.max() > 1.0:
        raise ValueError("probability map values must lie in [0, 1]")
    height, width = a.shape
    header = MAGIC + struct.pack("<II", width, height)
    Path(path).write_bytes(header + a.astype("<f4").tobytes())


def read_pmap(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError(f"bad magic {data[:4]!r}")
    width, height = struct.unpack_from("<II", data, 4)
    expected = 12 + 4 * width * height
    if len(data) != expected:
        raise ValueError(f"expected {expected} bytes, got {len(data)}")
    values = np.frombuffer(data, dtype="<f4", count=width * height, offset=12)
    return values.reshape(height, width).astype(np.float32)
