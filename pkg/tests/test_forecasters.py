import numpy as np
import pytest

from steadycast.core import Dataset, InsufficientHistoryError, TimeSeries, first_origin_time_for
from steadycast.forecasters import (
    PooledLagModel,
    fit_pooled,
    holt_linear,
    lag_heuristic,
    predict_iterated,
    rolling_origin_forecasts,
    seasonal_naive,
    tune_holt,
)


class TestLagHeuristic:
    @pytest.mark.parametrize("period,expected", [(7, 9), (12, 15), (1, 2)])
    def test_values(self, period, expected):
        assert lag_heuristic(period) == expected


class TestSeasonalNaive:
    def test_repeats_last_season(self):
        assert np.array_equal(seasonal_naive([1, 2, 3, 4], 2, 3), [3, 4, 3])

    def test_constant_series(self):
        assert np.array_equal(seasonal_naive([5.0] * 6, 3, 4), [5.0] * 4)

    def test_period_one_is_flat_last_value(self):
        assert np.array_equal(seasonal_naive([1, 2, 9], 1, 3), [9, 9, 9])

    def test_too_short(self):
        with pytest.raises(InsufficientHistoryError):
            seasonal_naive([1, 2], 3, 1)


class TestHoltLinear:
    def test_linear_series_fixed_point(self):
        y = 2.0 * np.arange(1, 21)
        for a, b in [(0.1, 0.1), (0.5, 0.5), (0.9, 0.2)]:
            fc = holt_linear(y, 4, a, b)
            expected = 2.0 * np.arange(21, 25)
            assert np.allclose(fc, expected, atol=1e-6)

    def test_constant_series(self):
        fc = holt_linear([3.0] * 10, 3)
        assert np.allclose(fc, 3.0, atol=1e-9)

    def test_hand_run_two_points(self):
        assert holt_linear([1, 3], 1, 0.5, 0.5)[0] == pytest.approx(5.0)

    def test_too_short(self):
        with pytest.raises(InsufficientHistoryError):
            holt_linear([1.0], 2)

    def test_tune_recovers_low_error_params(self):
        y = 2.0 * np.arange(1, 30) + 0.01 * np.sin(np.arange(29))
        a, b = tune_holt(y)
        assert 0.1 <= a <= 0.9 and 0.1 <= b <= 0.9


class TestPooledFit:
    def test_noiseless_recursion_recovered_exactly(self):
        rng = np.random.default_rng(0)
        y = np.empty(120)
        y[:2] = rng.normal(size=2)
        for t in range(2, 120):
            y[t] = 0.6 * y[t - 1] + 0.3 * y[t - 2] + 2.0
        model = fit_pooled([y], 2)
        assert np.allclose(model.coefficients, [0.6, 0.3], atol=1e-5)
        assert model.intercept == pytest.approx(2.0, abs=1e-4)

    def test_random_walk_near_identity(self):
        rng = np.random.default_rng(5)
        y = 100.0 + np.cumsum(rng.normal(size=3000))
        model = fit_pooled([y], 3)
        assert model.coefficients[0] == pytest.approx(1.0, abs=0.05)
        assert abs(model.coefficients[1]) < 0.08 and abs(model.coefficients[2]) < 0.08

    def test_white_noise_recovers_mean(self):
        rng = np.random.default_rng(42)
        n = 4000
        y = rng.normal(loc=2.5, scale=1.0, size=n)
        model = fit_pooled([y], 2)
        # OLS on white noise: coefficients ~ 0, intercept ~ mean, within 3 SE
        se = 1.0 / np.sqrt(n)
        assert abs(model.coefficients[0]) < 3 * se * 1.5
        assert abs(model.coefficients[1]) < 3 * se * 1.5
        assert abs(model.intercept - 2.5) < 3 * se * np.sqrt(1 + 2.5**2) * 2

    def test_duplicated_series_same_fit(self):
        rng = np.random.default_rng(7)
        y = rng.normal(size=80).cumsum()
        one = fit_pooled([y], 3)
        two = fit_pooled([y, y], 3)
        assert np.allclose(one.coefficients, two.coefficients, atol=1e-6)
        assert one.intercept == pytest.approx(two.intercept, abs=1e-6)

    def test_no_windows(self):
        with pytest.raises(Exception):
            fit_pooled([np.array([1.0, 2.0])], 5)

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(3)
        sets = [rng.normal(size=120).cumsum() for _ in range(4)]
        p = 3
        model = fit_pooled(sets, p)
        rows, targets = [], []
        for y in sets:
            for t in range(p, len(y)):
                rows.append(list(y[t - p : t][::-1]) + [1.0])
                targets.append(y[t])
        X = np.asarray(rows)
        resid = np.asarray(targets) - X @ np.concatenate([model.coefficients, [model.intercept]])
        gradient = X.T @ resid
        scale = np.abs(X.T @ np.asarray(targets)).max()
        assert np.max(np.abs(gradient)) / scale < 1e-6


class TestPredictIterated:
    def test_identity_model_flat(self):
        model = PooledLagModel(2, np.array([1.0, 0.0]), 0.0)
        assert np.array_equal(predict_iterated(model, [4.0, 9.0], 4), [9.0] * 4)

    def test_constant_model(self):
        model = PooledLagModel(1, np.array([0.0]), 3.25)
        assert np.array_equal(predict_iterated(model, [100.0], 3), [3.25] * 3)

    def test_geometric_decay(self):
        model = PooledLagModel(1, np.array([0.5]), 0.0)
        assert np.allclose(predict_iterated(model, [8.0], 3), [4.0, 2.0, 1.0])

    def test_stable_ar_converges_to_fixed_point(self):
        model = PooledLagModel(1, np.array([0.8]), 1.0)
        fixed_point = 1.0 / (1 - 0.8)
        path = predict_iterated(model, [20.0], 50)
        gaps = np.abs(path - fixed_point)
        assert np.all(np.diff(gaps) <= 1e-12)
        assert gaps[-1] < 1e-3

    def test_too_short(self):
        model = PooledLagModel(3, np.zeros(3), 0.0)
        with pytest.raises(InsufficientHistoryError):
            predict_iterated(model, [1.0, 2.0], 1)


class TestRollingOrigin:
    def test_snaive_placement_example(self):
        series = TimeSeries("a", np.array([1.0, 2, 3, 4, 5, 6]), 1)
        ds = Dataset(series=(series,))
        matrices, skipped = rolling_origin_forecasts(ds, "snaive", horizon=2, n_origins=2)
        assert not skipped
        m = matrices["a"]
        assert m.first_origin_time == 3
        assert np.array_equal(m.rows, [[3.0, 3.0], [4.0, 4.0]])

    def test_m4_monthly_shape(self):
        rng = np.random.default_rng(0)
        series = TimeSeries("m", rng.normal(size=120).cumsum() + 100, 12)
        ds = Dataset(series=(series,))
        matrices, _ = rolling_origin_forecasts(ds, "snaive", horizon=6, n_origins=13)
        assert matrices["m"].rows.shape == (13, 6)

    def test_single_origin(self):
        series = TimeSeries("a", np.arange(1.0, 21.0), 2)
        ds = Dataset(series=(series,))
        matrices, _ = rolling_origin_forecasts(ds, "holt", horizon=3, n_origins=1)
        assert matrices["a"].rows.shape == (1, 3)
        assert matrices["a"].first_origin_time == first_origin_time_for(20, 3, 1)

    def test_short_series_skipped_with_reason(self):
        good = TimeSeries("good", np.arange(1.0, 40.0), 12)
        short = TimeSeries("short", np.arange(1.0, 14.0), 12)
        ds = Dataset(series=(good, short))
        matrices, skipped = rolling_origin_forecasts(ds, "snaive", horizon=6, n_origins=5)
        assert "good" in matrices and "short" not in matrices
        assert skipped and skipped[0][0] == "short"

    def test_determinism(self, small_dataset):
        a, _ = rolling_origin_forecasts(small_dataset, "pooled", horizon=4, n_origins=3)
        b, _ = rolling_origin_forecasts(small_dataset, "pooled", horizon=4, n_origins=3)
        for sid in a:
            assert np.array_equal(a[sid].rows, b[sid].rows)

    def test_pooled_refits_each_origin(self, small_dataset):
        matrices, _ = rolling_origin_forecasts(small_dataset, "pooled", horizon=4, n_origins=3)
        sid = small_dataset.series[0].id
        assert matrices[sid].rows.shape == (3, 4)

    def test_pooled_mean_scaling_invariant_on_identical_scales(self, small_dataset):
        plain, _ = rolling_origin_forecasts(small_dataset, "pooled", 4, 3)
        scaled, _ = rolling_origin_forecasts(
            small_dataset, "pooled", 4, 3, pooled_mean_scaling=True
        )
        for sid in plain:
            assert scaled[sid].rows.shape == plain[sid].rows.shape
            assert np.all(np.isfinite(scaled[sid].rows))

    def test_pooled_mean_scaling_aligns_disparate_scales(self):
        rng = np.random.default_rng(9)
        base = rng.normal(0, 1, size=60).cumsum() + 20
        small = TimeSeries("small", base, 2)
        large = TimeSeries("large", base * 1000.0, 2)
        ds = Dataset(series=(small, large))
        scaled, _ = rolling_origin_forecasts(ds, "pooled", 3, 2, pooled_mean_scaling=True)
        # same shape series at different scales produce proportional forecasts
        ratio = scaled["large"].rows / scaled["small"].rows
        assert np.allclose(ratio, 1000.0, rtol=1e-6)
