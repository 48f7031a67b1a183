"""Acceptance checklist for the trainer package."""

import functools
import json
import subprocess
import sys

import numpy as np
from PIL import Image

from unet_trainer import NetConfig, build_model, conv_widths, dropout_schedule, salt_and_pepper
from unet_trainer.augment import flip_horizontal
from unet_trainer.config import DROPOUT_SCHEDULE
from unet_trainer.export import export_pmaps


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"[ FAIL ] {name}", flush=True)
                raise
            print(f"[ PASS ] {name}", flush=True)
            return result

        return wrapper

    return decorate


@criterion("network contract: 512x512x1 -> 512x512x1 in [0,1], symmetric widths, dropout schedule")
def test_network_contract():
    model = build_model(NetConfig())
    out = model.predict(np.zeros((1, 512, 512, 1), dtype=np.float32), verbose=0)
    assert out.shape == (1, 512, 512, 1)
    assert out.min() >= 0.0 and out.max() <= 1.0

    per_level = conv_widths(model)[0::2]
    assert per_level[:5] == [16, 32, 64, 128, 256]
    assert per_level[5:] == [128, 64, 32, 16]
    assert dropout_schedule(model) == list(DROPOUT_SCHEDULE)


@criterion("augmentation: salt-and-pepper replaces exactly round(0.05*pixels); double flip is identity")
def test_augmentation_counts():
    rng = np.random.default_rng(0)
    image = np.full((512, 512), 0.5, dtype=np.float32)
    noisy = salt_and_pepper(image, rng)
    assert int(np.count_nonzero(noisy != image)) == 13107

    mask = (np.random.default_rng(1).random((32, 32)) < 0.5).astype(np.float32)
    i2, m2 = flip_horizontal(*flip_horizontal(image[:32, :32], mask))
    np.testing.assert_array_equal(i2, image[:32, :32])
    np.testing.assert_array_equal(m2, mask)


@criterion("integration: exported PMAP files run through the splitting CLI end to end")
def test_exported_pmaps_feed_the_pipeline(tmp_path):
    images = tmp_path / "images"
    images.mkdir()
    rng = np.random.default_rng(3)
    Image.fromarray((rng.random((70, 60)) * 255).astype(np.uint8)).save(images / "a.png")

    net = NetConfig(input_size=64, base_filters=4)
    weights = tmp_path / "w.weights.h5"
    build_model(net).save_weights(weights)
    exported = export_pmaps(weights, images, tmp_path / "pmaps", net)

    out = tmp_path / "labels.pgm"
    proc = subprocess.run(
        [sys.executable, "-m", "instaseg.cli", "split", str(exported[0]),
         "-o", str(out), "--min-area", "0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    record = json.loads(proc.stdout)
    assert "count" in record and "degenerate" in record
    assert out.exists()
