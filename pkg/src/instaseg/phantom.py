"""Seeded synthetic probability maps with known instance ground truth.

A phantom arranges Gaussian blobs along two arcs (mimicking objects in two
opposing rows), joins consecutive blobs on an arc with a narrow bright
bridge, and adds uniform noise.  The true label map marks each blob's core,
so splitting and counting can be verified without any real data.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

_MASK64 = (1 << 64) - 1

# Blob support is cut off at this many sigmas.
TRUNCATION_SIGMAS = 3.0
# A blob's truth core is where its own bump is >= half its peak.
_CORE_RADIUS_SIGMAS = math.sqrt(2.0 * math.log(2.0))
BRIDGE_HALF_WIDTH = 1.5  # 3-pixel-wide bridges


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class Xorshift64Star:
    """Self-contained xorshift64* stream; same seed gives the same stream everywhere."""

    def __init__(self, seed: int):
        state, mixed = _splitmix64(int(seed) & _MASK64)
        while mixed == 0:
            state, mixed = _splitmix64(state)
        self._state = mixed

    def next_u64(self) -> int:
        s = self._state
        s ^= (s >> 12)
        s ^= (s << 25) & _MASK64
        s ^= (s >> 27)
        self._state = s
        return (s * 0x2545F4914F6CDD1D) & _MASK64

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 352
    height: int = 256
    n_blobs: int = 14
    blob_peak: float = 0.95
    blob_sigma: float = 9.0
    bridge_value: float = 0.4
    noise_amplitude: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("canvas dimensions must be >= 1")
        if self.n_blobs < 0:
            raise ValueError("n_blobs must be >= 0")
        if not 0.0 < self.blob_peak <= 1.0:
            raise ValueError("blob_peak must lie in (0, 1]")
        if not 0.0 <= self.bridge_value < 1.0:
            raise ValueError("bridge_value must lie in [0, 1)")
        if self.blob_peak <= self.bridge_value:
            raise ValueError("blob_peak must exceed bridge_value")
        if not 0.0 <= self.noise_amplitude < 1.0:
            raise ValueError("noise_amplitude must lie in [0, 1)")
        if self.blob_sigma <= 0:
            raise ValueError("blob_sigma must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PhantomPair:
    map: np.ndarray
    truth_labels: np.ndarray
    truth_count: int


def _arc_centers(spec: PhantomSpec) -> list[list[tuple[float, float]]]:
    """Blob centers per arc; raises if the layout cannot fit the canvas."""
    if spec.n_blobs == 0:
        return [[], []]
    margin = math.ceil(TRUNCATION_SIGMAS * spec.blob_sigma) + 2
    if spec.width <= 2 * margin or spec.height <= 2 * margin:
        raise ValueError("blobs do not fit the canvas at the requested sigma/count")
    usable = spec.width - 2 * margin
    half_span = spec.width / 2.0 - margin
    bow = min(2.0 * spec.blob_sigma, 0.08 * spec.height)
    arcs = []
    counts = ((spec.n_blobs + 1) // 2, spec.n_blobs // 2)
    rows = (0.35 * spec.height, 0.65 * spec.height)
    signs = (1.0, -1.0)
    for count, row, sign in zip(counts, rows, signs):
        centers = []
        for i in range(count):
            x = margin + (i + 0.5) * usable / count
            xi = (x - spec.width / 2.0) / half_span
            y = row + sign * bow * (xi * xi - 0.5)
            centers.append((x, y))
        arcs.append(centers)

    flat = [c for arc in arcs for c in arc]
    min_gap = 2.0 * spec.blob_sigma
    for i in range(len(flat)):
        x, y = flat[i]
        if not (margin <= x <= spec.width - margin and margin <= y <= spec.height - margin):
            raise ValueError("blobs do not fit the canvas at the requested sigma/count")
        for j in range(i + 1, len(flat)):
            if math.hypot(x - flat[j][0], y - flat[j][1]) < min_gap:
                raise ValueError("blobs do not fit the canvas at the requested sigma/count")
    return arcs


def _paint_blob(canvas, truth, best_d2, center, index, spec):
    cx, cy = center
    radius = TRUNCATION_SIGMAS * spec.blob_sigma
    x0 = max(0, int(math.floor(cx - radius)))
    x1 = min(spec.width, int(math.ceil(cx + radius)) + 1)
    y0 = max(0, int(math.floor(cy - radius)))
    y1 = min(spec.height, int(math.ceil(cy + radius)) + 1)
    ys, xs = np.mgrid[y0:y1, x0:x1]
    d2 = (xs - cx) ** 2 + (ys - cy) ** 2
    bump = np.where(d2 <= radius * radius,
                    spec.blob_peak * np.exp(-d2 / (2.0 * spec.blob_sigma ** 2)), 0.0)
    region = canvas[y0:y1, x0:x1]
    np.maximum(region, bump, out=region)

    core = (d2 <= _CORE_RADIUS_SIGMAS ** 2 * spec.blob_sigma ** 2) & (d2 < best_d2[y0:y1, x0:x1])
    truth[y0:y1, x0:x1][core] = index
    best_d2[y0:y1, x0:x1][core] = d2[core]


def _paint_bridge(canvas, p, q, value, width, height):
    (x1, y1), (x2, y2) = p, q
    pad = BRIDGE_HALF_WIDTH + 1.0
    x0 = max(0, int(math.floor(min(x1, x2) - pad)))
    xe = min(width, int(math.ceil(max(x1, x2) + pad)) + 1)
    y0 = max(0, int(math.floor(min(y1, y2) - pad)))
    ye = min(height, int(math.ceil(max(y1, y2) + pad)) + 1)
    ys, xs = np.mgrid[y0:ye, x0:xe]
    vx, vy = x2 - x1, y2 - y1
    t = np.clip(((xs - x1) * vx + (ys - y1) * vy) / (vx * vx + vy * vy), 0.0, 1.0)
    d2 = (xs - x1 - t * vx) ** 2 + (ys - y1 - t * vy) ** 2
    ribbon = d2 <= BRIDGE_HALF_WIDTH ** 2
    region = canvas[y0:ye, x0:xe]
    np.maximum(region, np.where(ribbon, value, 0.0), out=region)


def generate(spec: PhantomSpec) -> PhantomPair:
    """Render a phantom probability map and its ground-truth labels."""
    arcs = _arc_centers(spec)
    canvas = np.zeros((spec.height, spec.width), dtype=np.float64)
    truth = np.zeros((spec.height, spec.width), dtype=np.int32)
    best_d2 = np.full((spec.height, spec.width), np.inf)

    index = 0
    for arc in arcs:
        for center in arc:
            index += 1
            _paint_blob(canvas, truth, best_d2, center, index, spec)
    for arc in arcs:
        for p, q in zip(arc, arc[1:]):
            _paint_bridge(canvas, p, q, spec.bridge_value, spec.width, spec.height)

    if spec.noise_amplitude > 0.0:
        rng = Xorshift64Star(spec.seed)
        noise = np.empty(spec.width * spec.height, dtype=np.float64)
        for i in range(noise.size):
            noise[i] = rng.random()
        canvas += noise.reshape(spec.height, spec.width) * spec.noise_amplitude

    return PhantomPair(
        map=np.clip(canvas, 0.0, 1.0).astype(np.float32),
        truth_labels=truth,
        truth_count=spec.n_blobs,
    )
