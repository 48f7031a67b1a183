"""Cross-validated training harness."""

from __future__ import annotations

import json
from pathlib import Path

import keras
import numpy as np

from .augment import augment_pair
from .config import EXPERIMENTS, TrainConfig
from .data import fold_split, load_pairs
from .model import build_model


def dice_coefficient(y_true, y_pred):
    """Overlap metric on the binarized prediction, for monitoring."""
    from keras import ops

    pred = ops.cast(y_pred >= 0.5, "float32")
    truth = ops.cast(y_true, "float32")
    intersection = ops.sum(pred * truth)
    denom = ops.sum(pred) + ops.sum(truth)
    return ops.where(denom > 0, 2.0 * intersection / denom, 1.0)


def compile_model(model: keras.Model, cfg: TrainConfig) -> keras.Model:
    model.compile(
        optimizer=keras.optimizers.Adam(learning_rate=cfg.learning_rate),
        loss=cfg.loss,
        metrics=[dice_coefficient],
    )
    return model


def _augmented_epoch(x, y, experiment, rng):
    images = np.empty_like(x)
    masks = np.empty_like(y)
    for i in range(x.shape[0]):
        img, msk = augment_pair(x[i, ..., 0], y[i, ..., 0], experiment, rng)
        images[i, ..., 0] = img
        masks[i, ..., 0] = msk
    return images, masks


def train_fold(model, x_train, y_train, x_val, y_val, cfg: TrainConfig, rng):
    """Train one fold; augmentation is re-drawn every epoch."""
    experiment = EXPERIMENTS[cfg.experiment]
    history = None
    for _ in range(cfg.epochs):
        images, masks = _augmented_epoch(x_train, y_train, experiment, rng)
        history = model.fit(images, masks, batch_size=cfg.batch_size,
                            epochs=1, shuffle=True, verbose=0)
    if x_val.shape[0]:
        val_loss, val_dice = model.evaluate(x_val, y_val, verbose=0,
                                            batch_size=cfg.batch_size)
    else:
        val_loss, val_dice = float("nan"), float("nan")
    train_dice = float(history.history["dice_coefficient"][-1]) if history else float("nan")
    return {"train_dice": train_dice, "val_loss": float(val_loss), "val_dice": float(val_dice)}


def train_experiment(cfg: TrainConfig, data_dir, out_dir) -> dict:
    """Run the k-fold protocol for one experiment and write a run manifest.

    Returns the manifest: every configuration field plus per-fold
    validation Dice and checkpoint paths.
    """
    experiment = EXPERIMENTS[cfg.experiment]
    x, y, stems = load_pairs(data_dir, experiment.mask_kind, cfg.net.input_size)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    folds = []
    for fold in range(cfg.folds):
        keras.utils.set_random_seed(cfg.seed + fold)
        rng = np.random.default_rng(cfg.seed + fold)
        train_idx, val_idx = fold_split(x.shape[0], cfg.folds, fold)
        model = compile_model(build_model(cfg.net), cfg)
        stats = train_fold(model, x[train_idx], y[train_idx], x[val_idx], y[val_idx], cfg, rng)
        weights_path = out / f"{cfg.experiment}_fold{fold:02d}.weights.h5"
        model.save_weights(weights_path)
        folds.append({
            "fold": fold,
            "weights": weights_path.name,
            "val_stems": [stems[i] for i in val_idx],
            **stats,
        })

    manifest = {**cfg.as_dict(), "n_images": x.shape[0], "folds": folds}
    (out / f"{cfg.experiment}_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
