"""Readers and writers for the on-disk raster formats.

PMAP (probability maps)
    Magic bytes ``PMAP``, then width and height as little-endian ``u32``,
    then ``width * height`` IEEE-754 binary32 little-endian values in
    row-major order, top-left origin.  Values must lie in ``[0, 1]``.

Gray images
    Binary PGM (``P5``) with maxval 255.

Label maps
    Binary PGM (``P5``) with maxval 65535; samples are big-endian 16-bit
    per PGM convention.

Writers emit canonical headers, so ``write(read(f)) == f`` byte for byte
for any file this module produced.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .validation import check_gray_image, check_label_map, check_prob_map

PMAP_MAGIC = b"PMAP"

# Refuse absurd headers before allocating anything.
MAX_PIXELS = 1 << 28


class FormatError(ValueError):
    """Malformed raster file; ``offset`` is the byte position of the defect."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)


class BadMagicError(FormatError):
    pass


class TruncatedFileError(FormatError):
    pass


class DimensionError(FormatError):
    pass


class ValueRangeError(FormatError):
    pass


class HeaderError(FormatError):
    pass


class MaxvalError(FormatError):
    pass


def read_pmap(path) -> np.ndarray:
    """Read a PMAP file into a float32 probability map."""
    data = Path(path).read_bytes()
    if len(data) < 4:
        raise TruncatedFileError("file too short for PMAP magic", offset=len(data))
    if data[:4] != PMAP_MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}, expected {PMAP_MAGIC!r}", offset=0)
    if len(data) < 12:
        raise TruncatedFileError("file too short for PMAP dimensions", offset=len(data))
    width, height = struct.unpack_from("<II", data, 4)
    if width == 0:
        raise DimensionError("width must be >= 1", offset=4)
    if height == 0:
        raise DimensionError("height must be >= 1", offset=8)
    if width * height > MAX_PIXELS:
        raise DimensionError(f"dimension overflow: {width}x{height} exceeds {MAX_PIXELS} pixels", offset=4)
    need = 12 + 4 * width * height
    if len(data) < need:
        raise TruncatedFileError(f"truncated payload: expected {need} bytes, got {len(data)}", offset=len(data))
    if len(data) > need:
        raise FormatError("trailing bytes after PMAP payload", offset=need)
    values = np.frombuffer(data, dtype="<f4", count=width * height, offset=12)
    bad = ~(np.isfinite(values) & (values >= 0.0) & (values <= 1.0))
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ValueRangeError(f"value {values[i]!r} outside [0, 1]", offset=12 + 4 * i)
    return values.reshape(height, width).astype(np.float32)


def write_pmap(prob_map, path) -> None:
    """Write a probability map as a PMAP file (lossless at binary32)."""
    p = check_prob_map(prob_map)
    height, width = p.shape
    header = PMAP_MAGIC + struct.pack("<II", width, height)
    Path(path).write_bytes(header + p.astype("<f4").tobytes())


def _parse_pgm_header(data: bytes):
    """Parse a binary PGM header; returns (width, height, maxval, payload offset)."""
    if data[:2] != b"P5":
        raise BadMagicError(f"bad magic {data[:2]!r}, expected b'P5'", offset=0)
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data):
            c = data[pos]
            if c in b" \t\r\n":
                pos += 1
            elif c in b"#":
                while pos < len(data) and data[pos] not in b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos] not in b" \t\r\n#":
            pos += 1
        token = data[start:pos]
        if not token:
            raise HeaderError("malformed header: missing dimension/maxval field", offset=start)
        try:
            fields.append(int(token))
        except ValueError:
            raise HeaderError(f"malformed header: non-numeric field {token!r}", offset=start) from None
    if pos >= len(data) or data[pos] not in b" \t\r\n":
        raise HeaderError("malformed header: maxval not followed by whitespace", offset=pos)
    pos += 1
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise DimensionError(f"invalid dimensions {width}x{height}", offset=2)
    if width * height > MAX_PIXELS:
        raise DimensionError(f"dimension overflow: {width}x{height} exceeds {MAX_PIXELS} pixels", offset=2)
    return width, height, maxval, pos


def _read_pgm(path, expected_maxval: int, bytes_per_sample: int):
    data = Path(path).read_bytes()
    width, height, maxval, pos = _parse_pgm_header(data)
    if maxval != expected_maxval:
        raise MaxvalError(f"maxval mismatch: expected {expected_maxval}, got {maxval}", offset=2)
    need = pos + bytes_per_sample * width * height
    if len(data) < need:
        raise TruncatedFileError(f"short payload: expected {need} bytes, got {len(data)}", offset=len(data))
    if len(data) > need:
        raise FormatError("trailing bytes after PGM payload", offset=need)
    return data, width, height, pos


def read_gray(path) -> np.ndarray:
    """Read an 8-bit binary PGM (P5, maxval 255) into a uint8 image."""
    data, width, height, pos = _read_pgm(path, 255, 1)
    return np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos).reshape(height, width).copy()


def write_gray(image, path) -> None:
    img = check_gray_image(image)
    height, width = img.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.tobytes())


def read_label(path) -> np.ndarray:
    """Read a 16-bit binary PGM (P5, maxval 65535, big-endian) into an int32 label map."""
    data, width, height, pos = _read_pgm(path, 65535, 2)
    samples = np.frombuffer(data, dtype=">u2", count=width * height, offset=pos)
    return samples.reshape(height, width).astype(np.int32)


def write_label(label_map, path) -> None:
    labels = check_label_map(label_map)
    if labels.max(initial=0) > 65535:
        raise ValueError("label map exceeds 16-bit range")
    height, width = labels.shape
    header = f"P5\n{width} {height}\n65535\n".encode("ascii")
    Path(path).write_bytes(header + labels.astype(">u2").tobytes())
