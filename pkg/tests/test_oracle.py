import math

import numpy as np
import pytest

from src.channel.decision_sets import ee_pair_grid, single_channel_grid, sr_simplex_grid
from src.channel.model_core import Scenario, ee_utility, sr_utility
from src.quantizer.oracle import (
    FeasibleRegion,
    OracleConfig,
    continuous_opt,
    log_continuous_opt,
    discrete_best,
    ee_opt_power_1band,
    golden_section_max,
    oracle_label,
    oracle_labels,
    utility_matrix,
    waterfill_sr,
)
from src.quantizer.analytic_quantizer import build_partition, quantize
from src.utils.errors import DimensionError


class TestOracleLabels:
    def test_utility_matrix_shape(self, ee_two_band):
        ds = ee_pair_grid(8, 5.0)
        gains = np.ones((3, 2))
        assert utility_matrix(gains, ds, ee_two_band).shape == (3, 8)

    def test_picks_the_stronger_band(self, ee_two_band):
        ds = ee_pair_grid(2, 5.0)
        assert oracle_label([2.0, 0.1], ds, ee_two_band) == 1
        assert oracle_label([0.1, 2.0], ds, ee_two_band) == 2

    def test_ties_resolve_to_smallest_label(self, ee_two_band):
        assert oracle_label([1.0, 1.0], ee_pair_grid(2, 5.0), ee_two_band) == 1

    def test_label_attains_discrete_best(self, sr_two_band, rng):
        ds = sr_simplex_grid(9, 5.0)
        gains = rng.exponential(size=(500, 2))
        labels = oracle_labels(gains, ds, sr_two_band)
        achieved = sr_utility(ds.power(labels), gains, sr_two_band)
        np.testing.assert_array_equal(achieved, discrete_best(gains, ds, sr_two_band))

    @pytest.mark.parametrize("m", [2, 4, 8])
    def test_tiny_gains_pick_full_power(self, ee_one_band, m):
        ds = single_channel_grid(m, ee_one_band.p_max)
        gains = np.array([[1e-4], [2.5e-4], [1e-6]])
        labels = oracle_labels(gains, ds, ee_one_band)
        np.testing.assert_array_equal(labels, [m] * 3)
        np.testing.assert_array_equal(labels, quantize(build_partition(ds, ee_one_band), gains[:, 0]))

    def test_dimension_mismatch(self, ee_two_band):
        with pytest.raises(DimensionError):
            oracle_labels(np.ones((4, 3)), ee_pair_grid(4, 5.0), ee_two_band)


class TestEeOptPower:
    def test_examples(self, ee_one_band):
        assert ee_opt_power_1band(1.0, ee_one_band) == pytest.approx(1.0)
        assert ee_opt_power_1band(0.1, ee_one_band) == 5.0
        assert ee_opt_power_1band(4.0, ee_one_band) == pytest.approx(0.25)

    def test_rejects_degenerate_inputs(self, ee_one_band):
        with pytest.raises(ValueError):
            ee_opt_power_1band(0.0, ee_one_band)
        with pytest.raises(ValueError):
            ee_opt_power_1band(1.0, Scenario(n_bands=1, c=0.0))

    def test_matches_dense_grid_search(self, ee_one_band, rng):
        grid = np.linspace(ee_one_band.p_max / 1e6, ee_one_band.p_max, 1_000_000)
        step = grid[1] - grid[0]
        for g in rng.exponential(size=100):
            values = ee_utility(grid[:, None], [g], ee_one_band)
            assert abs(ee_opt_power_1band(g, ee_one_band) - grid[np.argmax(values)]) <= step


class TestWaterfill:
    def test_symmetric_gains_split_evenly(self, sr_two_band):
        np.testing.assert_allclose(waterfill_sr([1.0, 1.0], sr_two_band), [2.5, 2.5])
        value = sr_utility(waterfill_sr([1.0, 1.0], sr_two_band), [1.0, 1.0], sr_two_band)
        assert value == pytest.approx(2 * math.log(3.5))

    def test_weak_band_is_switched_off(self, sr_two_band):
        p = waterfill_sr([10.0, 0.01], sr_two_band)
        np.testing.assert_allclose(p, [5.0, 0.0])

    def test_kkt_residual(self, sr_two_band, rng):
        gains = rng.exponential(size=(10_000, 2))
        powers = waterfill_sr(gains, sr_two_band)
        floors = sr_two_band.noise_var / gains
        active = powers > 0

        assert np.max(np.abs(powers.sum(axis=1) - sr_two_band.p_max)) <= 1e-9
        mu = np.max(np.where(active, powers + floors, -np.inf), axis=1)
        residual_active = np.where(active, np.abs(powers + floors - mu[:, None]), 0.0)
        residual_inactive = np.where(active, 0.0, np.maximum(0.0, mu[:, None] - floors))
        assert np.max(residual_active) <= 1e-9
        assert np.max(residual_inactive) <= 1e-9

    def test_upper_bounds_simplex_grid(self, sr_two_band, rng):
        gains = rng.exponential(size=(10_000, 2))
        bound = sr_utility(waterfill_sr(gains, sr_two_band), gains, sr_two_band)
        best = discrete_best(gains, sr_simplex_grid(16, 5.0), sr_two_band)
        assert np.all(bound >= best - 1e-12)

    def test_general_band_count(self, rng):
        scn = Scenario(n_bands=4, utility="sr")
        gains = rng.exponential(size=(200, 4))
        powers = waterfill_sr(gains, scn)
        np.testing.assert_allclose(powers.sum(axis=1), scn.p_max, rtol=1e-12)
        assert np.all(powers >= 0)


class TestGoldenSection:
    def test_finds_parabola_peak(self):
        x, value = golden_section_max(lambda x: -(x - 2.0) ** 2, np.array([0.0]), np.array([5.0]))
        assert x[0] == pytest.approx(2.0, abs=1e-6)
        assert value[0] == pytest.approx(0.0, abs=1e-12)

    def test_vectorized(self):
        targets = np.array([0.5, 1.5, 4.0])
        x, _ = golden_section_max(lambda x: -(x - targets) ** 2, np.zeros(3), np.full(3, 5.0))
        np.testing.assert_allclose(x, targets, atol=1e-6)


class TestContinuousOpt:
    def test_single_band_ee_is_closed_form(self, ee_one_band):
        g = 2.0
        p = ee_opt_power_1band(g, ee_one_band)
        assert continuous_opt([g], ee_one_band) == pytest.approx(ee_utility([p], [g], ee_one_band), rel=1e-15)

    def test_two_band_ee_equals_best_single_band(self, ee_two_band, coarse_oracle, rng):
        gains = rng.exponential(size=(50, 2))
        single = Scenario(n_bands=1)
        expected = np.max([
            ee_utility(ee_opt_power_1band(gains[:, [k]], single), gains[:, [k]], single) for k in range(2)
        ], axis=0)
        np.testing.assert_allclose(continuous_opt(gains, ee_two_band, coarse_oracle), expected, rtol=1e-9)

    def test_bounds_every_decision(self, ee_two_band, sr_two_band, coarse_oracle, rng):
        gains = rng.exponential(size=(200, 2))
        ee_best = discrete_best(gains, ee_pair_grid(16, 5.0), ee_two_band)
        sr_best = discrete_best(gains, sr_simplex_grid(16, 5.0), sr_two_band)
        assert np.all(continuous_opt(gains, ee_two_band, coarse_oracle) >= ee_best - 1e-12)
        assert np.all(continuous_opt(gains, sr_two_band, coarse_oracle) >= sr_best - 1e-12)

    def test_sum_rate_on_box_uses_full_power(self, sr_two_band):
        cfg = OracleConfig(feasible_region=FeasibleRegion.BOX)
        value = continuous_opt([1.0, 1.0], sr_two_band, cfg)
        assert value == pytest.approx(2 * math.log(6.0))

    def test_ee_on_simplex_beats_its_corners(self, ee_two_band, rng):
        cfg = OracleConfig(grid_points_per_dim=201, feasible_region="simplex")
        gains = rng.exponential(size=(20, 2))
        corners = np.maximum(
            ee_utility(np.array([5.0, 0.0]), gains, ee_two_band),
            ee_utility(np.array([0.0, 5.0]), gains, ee_two_band),
        )
        assert np.all(continuous_opt(gains, ee_two_band, cfg) >= corners - 1e-12)

    def test_rejects_oversized_grid(self, rng):
        scn = Scenario(n_bands=3)
        with pytest.raises(ValueError):
            continuous_opt(rng.exponential(size=(2, 3)), scn, OracleConfig(grid_points_per_dim=1001))


class TestLogContinuousOpt:
    def test_matches_log_of_optimum(self, ee_two_band, sr_two_band, coarse_oracle, rng):
        gains = rng.uniform(0.2, 3.0, size=(30, 2))
        for scn in (ee_two_band, sr_two_band):
            np.testing.assert_allclose(
                log_continuous_opt(gains, scn, coarse_oracle), np.log(continuous_opt(gains, scn, coarse_oracle)),
                rtol=1e-12, atol=1e-12,
            )

    def test_finite_where_optimum_underflows(self, ee_one_band):
        assert continuous_opt([1e-4], ee_one_band) == 0.0
        # p* = p_max = 5 at this gain
        assert log_continuous_opt([1e-4], ee_one_band) == pytest.approx(-1 / 5e-4 - math.log(5.0), rel=1e-12)

    def test_two_band_and_simplex_stay_finite(self, ee_two_band, coarse_oracle):
        gains = np.array([[1e-4, 2e-4], [1e-5, 1.0]])
        simplex = OracleConfig(grid_points_per_dim=101, feasible_region="simplex")
        assert np.all(np.isfinite(log_continuous_opt(gains, ee_two_band, coarse_oracle)))
        assert np.all(np.isfinite(log_continuous_opt(gains, ee_two_band, simplex)))
