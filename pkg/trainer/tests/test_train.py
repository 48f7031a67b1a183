import json

import numpy as np
import pytest
from PIL import Image

from unet_trainer import EXPERIMENTS, NetConfig, TrainConfig
from unet_trainer.data import fold_split, load_pairs
from unet_trainer.train import compile_model, train_fold
from unet_trainer.model import build_model

SIZE = 64


def make_blob_scene(rng, size=SIZE):
    """A bright disk on a dark background; trivially learnable."""
    mask = np.zeros((size, size), dtype=np.float32)
    cy, cx = rng.integers(24, size - 24, size=2)
    yy, xx = np.mgrid[0:size, 0:size]
    mask[(yy - cy) ** 2 + (xx - cx) ** 2 <= 18 ** 2] = 1.0
    image = mask * 0.85 + 0.05 + rng.random((size, size), dtype=np.float32) * 0.05
    return image.astype(np.float32), mask


def test_experiment_table_matches_protocol():
    assert EXPERIMENTS["E1"].mask_kind == "full" and EXPERIMENTS["E2"].mask_kind == "split"
    # E2 and E1 differ only in the training mask variant
    e1, e2 = EXPERIMENTS["E1"], EXPERIMENTS["E2"]
    assert (e1.salt_pepper, e1.horizontal_flip, e1.vertical_flip) == \
           (e2.salt_pepper, e2.horizontal_flip, e2.vertical_flip) == (False, False, False)
    # E4 is E3 without the vertical flip
    e3, e4 = EXPERIMENTS["E3"], EXPERIMENTS["E4"]
    assert (e3.salt_pepper, e3.horizontal_flip) == (e4.salt_pepper, e4.horizontal_flip) == (True, True)
    assert e3.vertical_flip and not e4.vertical_flip
    assert e3.mask_kind == e4.mask_kind == "split"
    # E5 trains like E2 but enables the splitting pipeline at test time
    e5 = EXPERIMENTS["E5"]
    assert e5.post_processing and not EXPERIMENTS["E2"].post_processing
    assert (e5.salt_pepper, e5.horizontal_flip, e5.vertical_flip) == (False, False, False)


def test_fold_split_partitions_everything():
    train, val = fold_split(17, 10, 3)
    assert len(np.intersect1d(train, val)) == 0
    assert len(train) + len(val) == 17
    all_val = np.concatenate([fold_split(17, 10, f)[1] for f in range(10)])
    np.testing.assert_array_equal(np.sort(all_val), np.arange(17))
    with pytest.raises(ValueError):
        fold_split(17, 10, 10)


def test_load_pairs_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    (tmp_path / "images").mkdir()
    (tmp_path / "masks_split").mkdir()
    for i in range(3):
        image, mask = make_blob_scene(rng)
        Image.fromarray((image * 255).astype(np.uint8)).save(tmp_path / "images" / f"s{i}.png")
        Image.fromarray((mask * 255).astype(np.uint8)).save(tmp_path / "masks_split" / f"s{i}.png")
    x, y, stems = load_pairs(tmp_path, "split", SIZE)
    assert x.shape == (3, SIZE, SIZE, 1) and y.shape == (3, SIZE, SIZE, 1)
    assert stems == ["s0", "s1", "s2"]
    assert 0.0 <= x.min() and x.max() <= 1.0
    assert set(np.unique(y).tolist()) <= {0.0, 1.0}


def test_load_pairs_missing_mask_raises(tmp_path):
    (tmp_path / "images").mkdir()
    (tmp_path / "masks_full").mkdir()
    Image.fromarray(np.zeros((8, 8), dtype=np.uint8)).save(tmp_path / "images" / "a.png")
    with pytest.raises(FileNotFoundError):
        load_pairs(tmp_path, "full", SIZE)


def test_overfit_smoke_reaches_high_dice():
    # 5-image overfit run: 25 epochs must push training Dice past 0.8
    import keras

    keras.utils.set_random_seed(0)
    rng = np.random.default_rng(0)
    scenes = [make_blob_scene(rng) for _ in range(5)]
    x = np.stack([s[0] for s in scenes])[..., None]
    y = np.stack([s[1] for s in scenes])[..., None]

    cfg = TrainConfig(experiment="E2", epochs=25, batch_size=4, folds=5,
                      net=NetConfig(input_size=SIZE, base_filters=8))
    model = compile_model(build_model(cfg.net), cfg)
    stats = train_fold(model, x, y, x[:0], y[:0], cfg, rng)
    assert stats["train_dice"] > 0.8, stats


def test_manifest_records_config(tmp_path):
    cfg = TrainConfig(experiment="E4", epochs=1, batch_size=2, folds=2,
                      net=NetConfig(input_size=SIZE, base_filters=4))
    d = cfg.as_dict()
    payload = json.loads(json.dumps(d))
    assert payload["experiment"] == "E4"
    assert payload["epochs"] == 1 and payload["batch_size"] == 2
    assert payload["learning_rate"] == 0.001
    assert payload["net"]["dropout_rates"] == list(cfg.net.dropout_rates)
    assert payload["augmentation"]["vertical_flip"] is False
