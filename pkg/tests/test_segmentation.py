import numpy as np
import pytest
from sklearn.base import clone

from instaseg.phantom import PhantomSpec, generate
from instaseg.segmentation import (
    InstanceSplitter,
    PipelineConfig,
    ThresholdSplitter,
    binarize_fixed,
    count_instances,
    label_components,
    otsu_from_histogram,
    otsu_threshold,
    split_instances,
)
from oracles import flood_fill_labels, otsu_reference

PHANTOM_MIN_AREA = round(2000 * (352 * 256) / 2_600_000)  # cluster threshold at phantom scale


def random_histogram(rng):
    hist = rng.randint(0, 20, size=256)
    hist[rng.rand(256) < 0.6] = 0  # sparse histograms exercise ties
    return hist.astype(np.int64)


class TestOtsu:
    def test_constant_image_is_degenerate(self):
        result = otsu_threshold(np.full((8, 8), 42, dtype=np.uint8))
        assert result.degenerate
        assert result.threshold == 0

    def test_two_level_equal_counts_tie_breaks_low(self):
        img = np.array([[50, 200]] * 8, dtype=np.uint8)
        result = otsu_threshold(img)
        assert not result.degenerate
        assert result.threshold == 50
        assert result.between_class_variance == pytest.approx(5625.0)

    def test_matches_exact_rational_oracle(self):
        rng = np.random.RandomState(42)
        for _ in range(100):
            hist = random_histogram(rng)
            expected = otsu_reference(hist)
            got = otsu_from_histogram(hist)
            if expected is None:
                assert got.degenerate
            else:
                assert not got.degenerate
                assert got.threshold == expected[0]
                assert got.between_class_variance == pytest.approx(expected[1], rel=1e-12)

    def test_image_wrapper_equals_histogram_path(self):
        rng = np.random.RandomState(3)
        img = rng.randint(0, 256, size=(16, 16), dtype=np.uint8)
        a = otsu_threshold(img)
        b = otsu_from_histogram(np.bincount(img.ravel(), minlength=256))
        assert a == b

    def test_rejects_bad_histogram(self):
        with pytest.raises(ValueError):
            otsu_from_histogram(np.zeros(255, dtype=np.int64))
        with pytest.raises(ValueError):
            otsu_from_histogram(np.full(256, -1, dtype=np.int64))


class TestBinarizeFixed:
    def test_all_zero_map_is_empty(self):
        assert not binarize_fixed(np.zeros((4, 4), dtype=np.float32), 0.2).any()

    def test_boundary_is_foreground_on_equality(self):
        m = np.array([[0.19, 0.20, 0.21]], dtype=np.float32)
        np.testing.assert_array_equal(binarize_fixed(m, 0.2), [[False, True, True]])

    def test_matches_per_pixel_comparison(self):
        rng = np.random.RandomState(5)
        m = rng.uniform(0, 1, size=(16, 16)).astype(np.float32)
        np.testing.assert_array_equal(binarize_fixed(m, 0.5), m >= np.float32(0.5))

    def test_rejects_out_of_range_level(self):
        with pytest.raises(ValueError):
            binarize_fixed(np.zeros((2, 2), dtype=np.float32), 1.5)


class TestLabelComponents:
    def test_two_large_squares_survive(self):
        mask = np.zeros((120, 120), dtype=bool)
        mask[5:55, 5:55] = True
        mask[60:110, 60:110] = True
        labels = label_components(mask, min_area=2000, connectivity=8)
        assert count_instances(labels) == 2

    def test_square_below_area_threshold_is_dropped(self):
        mask = np.zeros((64, 64), dtype=bool)
        mask[10:50, 10:50] = True  # 1600 px
        labels = label_components(mask, min_area=2000, connectivity=8)
        assert count_instances(labels) == 0

    def test_diagonal_touch_depends_on_connectivity(self):
        mask = np.array([[1, 0], [0, 1]], dtype=bool)
        assert count_instances(label_components(mask, 0, 8)) == 1
        assert count_instances(label_components(mask, 0, 4)) == 2

    @pytest.mark.parametrize("connectivity", [4, 8])
    @pytest.mark.parametrize("min_area", [0, 10])
    def test_matches_flood_fill_oracle(self, connectivity, min_area):
        rng = np.random.RandomState(connectivity * 10 + min_area)
        for _ in range(25):
            mask = rng.rand(64, 64) < 0.5
            got = label_components(mask, min_area=min_area, connectivity=connectivity)
            expected = flood_fill_labels(mask, connectivity=connectivity, min_area=min_area)
            np.testing.assert_array_equal(got, expected)

    def test_labels_are_contiguous_and_ordered_by_first_pixel(self):
        rng = np.random.RandomState(99)
        mask = rng.rand(48, 48) < 0.35
        labels = label_components(mask, min_area=0, connectivity=4)
        k = count_instances(labels)
        present = np.unique(labels)
        np.testing.assert_array_equal(present, np.arange(k + 1))
        firsts = [np.flatnonzero(labels.ravel() == lbl)[0] for lbl in range(1, k + 1)]
        assert firsts == sorted(firsts)

    def test_lowering_min_area_never_decreases_count(self):
        rng = np.random.RandomState(7)
        mask = rng.rand(64, 64) < 0.45
        counts = [count_instances(label_components(mask, a, 8)) for a in (50, 20, 5, 0)]
        assert counts == sorted(counts)

    def test_rejects_bad_arguments(self):
        mask = np.zeros((4, 4), dtype=bool)
        with pytest.raises(ValueError):
            label_components(mask, min_area=-1)
        with pytest.raises(ValueError):
            label_components(mask, connectivity=6)


class TestCountInstances:
    def test_empty_map(self):
        assert count_instances(np.zeros((4, 4), dtype=np.int32)) == 0

    def test_three_labels(self):
        labels = np.array([[1, 2], [3, 0]], dtype=np.int32)
        assert count_instances(labels) == 3


class TestSplitInstances:
    def test_all_zero_map_has_no_instances(self):
        result = split_instances(np.zeros((32, 32), dtype=np.float32))
        assert result.n_instances == 0
        assert result.degenerate

    def test_phantom_blobs_are_recovered(self):
        pair = generate(PhantomSpec(seed=7))
        cfg = PipelineConfig(min_area=PHANTOM_MIN_AREA)
        result = split_instances(pair.map, cfg)
        assert not result.degenerate
        assert result.n_instances == pair.truth_count == 14

    def test_naive_threshold_merges_bridged_blobs(self):
        pair = generate(PhantomSpec(seed=7))
        naive = label_components(binarize_fixed(pair.map, 0.2), PHANTOM_MIN_AREA, 8)
        assert count_instances(naive) < pair.truth_count
        oracle = flood_fill_labels(binarize_fixed(pair.map, 0.2), 8, PHANTOM_MIN_AREA)
        assert count_instances(naive) == oracle.max()

    def test_deterministic_output(self):
        pair = generate(PhantomSpec(seed=3))
        cfg = PipelineConfig(min_area=PHANTOM_MIN_AREA)
        a = split_instances(pair.map, cfg)
        b = split_instances(pair.map, cfg)
        np.testing.assert_array_equal(a.labels, b.labels)
        assert a.labels.tobytes() == b.labels.tobytes()

    def test_stage_trace_files(self, tmp_path):
        pair = generate(PhantomSpec(seed=1))
        cfg = PipelineConfig(min_area=PHANTOM_MIN_AREA)
        split_instances(pair.map, cfg, trace_dir=tmp_path)
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == [
            "01_resized.pgm",
            "02_opened.pgm",
            "03_sharpened.pgm",
            "04_eroded1.pgm",
            "05_eroded2.pgm",
            "06_binary.pgm",
            "07_labels.pgm",
        ]

    def test_resize_to_target_dimensions(self):
        pair = generate(PhantomSpec(seed=2))
        cfg = PipelineConfig(min_area=4 * PHANTOM_MIN_AREA, target_w=704, target_h=512)
        result = split_instances(pair.map, cfg)
        assert result.labels.shape == (512, 704)
        assert result.n_instances == 14


class TestPipelineConfig:
    def test_rejects_invalid_values(self):
        with pytest.raises(ValueError):
            PipelineConfig(se_size=4)
        with pytest.raises(ValueError):
            PipelineConfig(erosion_passes=-1)
        with pytest.raises(ValueError):
            PipelineConfig(min_area=-2)
        with pytest.raises(ValueError):
            PipelineConfig(connectivity=5)
        with pytest.raises(ValueError):
            PipelineConfig(target_w=0)


class TestEstimators:
    def test_instance_splitter_single_and_batch(self):
        pair = generate(PhantomSpec(seed=4))
        est = InstanceSplitter(min_area=PHANTOM_MIN_AREA).fit()
        labels = est.transform(pair.map)
        assert labels.shape == pair.map.shape
        assert est.predict(pair.map) == 14
        counts = est.predict([pair.map, pair.map])
        np.testing.assert_array_equal(counts, [14, 14])

    def test_threshold_splitter_baseline(self):
        pair = generate(PhantomSpec(seed=4))
        base = ThresholdSplitter(level=0.2, min_area=PHANTOM_MIN_AREA).fit()
        assert base.predict(pair.map) < 14

    def test_get_params_round_trip_and_clone(self):
        est = InstanceSplitter(se_size=3, erosion_passes=1, min_area=10, connectivity=4)
        params = est.get_params()
        assert params["se_size"] == 3 and params["connectivity"] == 4
        cloned = clone(est)
        assert cloned.get_params() == params
        cloned.set_params(min_area=99)
        assert cloned.get_params()["min_area"] == 99

    def test_fit_validates_parameters(self):
        with pytest.raises(ValueError):
            InstanceSplitter(se_size=2).fit()
