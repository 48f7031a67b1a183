"""End-to-end: exported PMAP files feed the splitting pipeline's CLI."""

import json
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from unet_trainer import NetConfig, build_model
from unet_trainer.export import export_pmaps, predict_pmap
from unet_trainer.pmap import read_pmap, write_pmap

SIZE = 64


@pytest.fixture(scope="module")
def exported(tmp_path_factory):
    root = tmp_path_factory.mktemp("export")
    images = root / "images"
    images.mkdir()
    rng = np.random.default_rng(7)
    for i in range(2):
        img = (rng.random((96, 80)) * 255).astype(np.uint8)
        Image.fromarray(img).save(images / f"scan{i}.png")

    net = NetConfig(input_size=SIZE, base_filters=4)
    model = build_model(net)
    weights = root / "w.weights.h5"
    model.save_weights(weights)
    out = root / "pmaps"
    return export_pmaps(weights, images, out, net)


def test_pmap_write_read_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    m = rng.random((5, 9)).astype(np.float32)
    path = tmp_path / "m.pmap"
    write_pmap(m, path)
    np.testing.assert_array_equal(read_pmap(path), m)


def test_exported_maps_are_valid(exported):
    assert [p.name for p in exported] == ["scan0.pmap", "scan1.pmap"]
    for path in exported:
        back = read_pmap(path)
        assert back.shape == (SIZE, SIZE)
        assert back.min() >= 0.0 and back.max() <= 1.0


def test_predict_pmap_shape_and_range():
    net = NetConfig(input_size=SIZE, base_filters=4)
    model = build_model(net)
    out = predict_pmap(model, np.zeros((SIZE, SIZE), dtype=np.float32))
    assert out.shape == (SIZE, SIZE)
    assert out.dtype == np.float32
    assert 0.0 <= out.min() and out.max() <= 1.0


def test_split_cli_consumes_exported_pmap(exported, tmp_path):
    target = exported[0]
    out = tmp_path / "labels.pgm"
    proc = subprocess.run(
        [sys.executable, "-m", "instaseg.cli", "split", str(target),
         "-o", str(out), "--min-area", "0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    record = json.loads(proc.stdout)
    assert "count" in record and "degenerate" in record
    assert out.exists()
