from collections import Counter

import numpy as np
import pytest

from src.channel.decision_sets import ee_pair_grid, sr_simplex_grid
from src.experiments.dataset_io import (
    LabeledDataset,
    build_dataset,
    fingerprint,
    load_dataset,
    make_rng,
    sample_gains,
    save_dataset,
    split,
)
from src.utils.errors import FingerprintMismatchError


class TestSampleGains:
    def test_shape_and_support(self):
        gains = sample_gains(1000, 2, seed=0)
        assert gains.shape == (1000, 2)
        assert np.all(gains > 0)

    def test_exponential_mean(self):
        gains = sample_gains(100_000, 2, seed=2024)
        assert np.all(np.abs(gains.mean(axis=0) - 1.0) <= 0.0095)

    def test_same_seed_same_draws(self):
        np.testing.assert_array_equal(sample_gains(50, 2, seed=9), sample_gains(50, 2, seed=9))
        assert not np.array_equal(sample_gains(50, 2, seed=9), sample_gains(50, 2, seed=10))

    def test_generator_is_philox(self):
        assert isinstance(make_rng(0).bit_generator, np.random.Philox)

    def test_rejects_empty_request(self):
        with pytest.raises(ValueError):
            sample_gains(0, 2, seed=0)


class TestBuildDataset:
    def test_labels_in_range(self, ee_two_band):
        ds = ee_pair_grid(8, 5.0)
        data = build_dataset(sample_gains(300, 2, seed=1), ds, ee_two_band)
        assert len(data) == 300
        assert data.label_count == 8
        assert data.labels.min() >= 1 and data.labels.max() <= 8

    def test_rejects_nonpositive_gains(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.array([[1.0, 0.0]]), np.array([1]), 2, "x")

    def test_fingerprint_tracks_configuration(self, ee_two_band, sr_two_band):
        assert fingerprint(ee_two_band, ee_pair_grid(4, 5.0)) == fingerprint(ee_two_band, ee_pair_grid(4, 5.0))
        assert fingerprint(ee_two_band, ee_pair_grid(4, 5.0)) != fingerprint(ee_two_band, ee_pair_grid(8, 5.0))
        assert fingerprint(sr_two_band, sr_simplex_grid(4, 5.0)) != fingerprint(ee_two_band, sr_simplex_grid(4, 5.0))


class TestSplit:
    @pytest.fixture
    def data(self, sr_two_band):
        return build_dataset(sample_gains(10_000, 2, seed=5), sr_simplex_grid(8, 5.0), sr_two_band)

    def test_default_fraction(self, data):
        train, test = split(data, 0.9, seed=1)
        assert (len(train), len(test)) == (9000, 1000)

    def test_ten_samples(self, sr_two_band):
        data = build_dataset(sample_gains(10, 2, seed=5), sr_simplex_grid(4, 5.0), sr_two_band)
        train, test = split(data, 0.9, seed=1)
        assert (len(train), len(test)) == (9, 1)

    def test_halves_partition_the_samples(self, data):
        train, test = split(data, 0.9, seed=1)
        rows = lambda d: Counter(map(tuple, np.column_stack([d.gains, d.labels])))
        assert rows(train) + rows(test) == rows(data)

    def test_same_seed_same_split(self, data):
        a, _ = split(data, 0.9, seed=4)
        b, _ = split(data, 0.9, seed=4)
        np.testing.assert_array_equal(a.gains, b.gains)

    @pytest.mark.parametrize("fraction", [0.0, 1.0, 0.01])
    def test_degenerate_sizes(self, sr_two_band, fraction):
        data = build_dataset(sample_gains(10, 2, seed=5), sr_simplex_grid(4, 5.0), sr_two_band)
        with pytest.raises(ValueError):
            split(data, fraction, seed=0)


class TestPersistence:
    def test_round_trip_is_bit_exact(self, tmp_path, ee_two_band):
        data = build_dataset(sample_gains(500, 2, seed=8), ee_pair_grid(8, 5.0), ee_two_band)
        path = save_dataset(data, tmp_path / "train.csv", {"config": "abc"})

        loaded = load_dataset(path, expected_fingerprint=data.fingerprint)
        np.testing.assert_array_equal(loaded.gains, data.gains)
        np.testing.assert_array_equal(loaded.labels, data.labels)
        assert loaded.label_count == 8

    def test_header_lines(self, tmp_path, ee_two_band):
        data = build_dataset(sample_gains(5, 2, seed=8), ee_pair_grid(4, 5.0), ee_two_band)
        lines = save_dataset(data, tmp_path / "d.csv").read_text().splitlines()
        assert lines[0] == f"# fingerprint={data.fingerprint}"
        assert "g_1,g_2,label" in lines

    def test_fingerprint_mismatch(self, tmp_path, ee_two_band):
        data = build_dataset(sample_gains(20, 2, seed=8), ee_pair_grid(4, 5.0), ee_two_band)
        path = save_dataset(data, tmp_path / "d.csv")
        other = fingerprint(ee_two_band, ee_pair_grid(8, 5.0))
        with pytest.raises(FingerprintMismatchError):
            load_dataset(path, expected_fingerprint=other)
