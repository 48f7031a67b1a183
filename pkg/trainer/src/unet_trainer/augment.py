"""Joint image/mask augmentation: flips and salt-and-pepper noise."""

from __future__ import annotations

import numpy as np

from .config import SALT_PEPPER_FRACTION, Experiment


def flip_horizontal(image, mask):
    return np.flip(image, axis=1), np.flip(mask, axis=1)


def flip_vertical(image, mask):
    return np.flip(image, axis=0), np.flip(mask, axis=0)


def salt_and_pepper(image, rng: np.random.Generator, fraction: float = SALT_PEPPER_FRACTION):
    """Replace exactly ``round(fraction * pixels)`` distinct pixels with 0 or 1.

    Replacement values are equiprobable; the mask is never touched.
    """
    out = np.array(image, copy=True)
    n_replace = round(fraction * out.size)
    flat_idx = rng.choice(out.size, size=n_replace, replace=False)
    values = rng.integers(0, 2, size=n_replace).astype(out.dtype)
    out.reshape(-1)[flat_idx] = values
    return out


def augment_pair(image, mask, experiment: Experiment, rng: np.random.Generator):
    """Apply the experiment's augmentations; each enabled flip fires with p = 1/2.

    For an experiment with no augmentations enabled this is the identity.
    """
    if experiment.horizontal_flip and rng.random() < 0.5:
        image, mask = flip_horizontal(image, mask)
    if experiment.vertical_flip and rng.random() < 0.5:
        image, mask = flip_vertical(image, mask)
    if experiment.salt_pepper:
        image = salt_and_pepper(image, rng)
    return image, mask
