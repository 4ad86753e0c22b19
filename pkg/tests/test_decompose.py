import numpy as np
import pytest

from steadycast.core import InsufficientHistoryError, ShapeError
from steadycast.decompose import decompose, forecast_components, recompose


class TestDecompose:
    def test_pure_seasonal_two_period(self):
        y = np.tile([1.0, -1.0], 10)
        d = decompose(y, 2)
        assert np.allclose(d.seasonal, y, atol=1e-9)
        assert np.allclose(d.trend[2:-2], 0.0, atol=1e-9)
        assert np.allclose(d.remainder, 0.0, atol=1e-9)

    def test_constant_series(self):
        d = decompose(np.full(20, 7.0), 4)
        assert np.allclose(d.seasonal, 0.0, atol=1e-9)
        assert np.allclose(d.trend, 7.0, atol=1e-9)
        assert np.allclose(d.remainder, 0.0, atol=1e-9)

    def test_linear_plus_seasonal_interior(self):
        i = np.arange(1.0, 25.0)
        y = 3.0 * i + np.tile([2.0, -2.0], 12)
        d = decompose(y, 2)
        assert np.allclose(d.trend[1:-1], 3.0 * i[1:-1], atol=1e-6)
        assert np.allclose(d.remainder[1:-1], 0.0, atol=1e-6)

    def test_exact_additivity_random(self, rng):
        for _ in range(100):
            m = int(rng.integers(1, 13))
            n = int(rng.integers(2 * m + 1, 2 * m + 60))
            y = rng.normal(0, 10, size=n) + rng.uniform(-5, 5) * np.arange(n) / n
            d = decompose(y, m)
            assert np.max(np.abs(d.trend + d.seasonal + d.remainder - y)) <= 1e-9

    def test_seasonal_sums_to_zero(self, rng):
        for _ in range(100):
            m = int(rng.integers(2, 13))
            n = int(rng.integers(2 * m + 1, 2 * m + 40))
            y = rng.normal(0, 10, size=n)
            d = decompose(y, m)
            assert abs(d.seasonal[:m].sum()) <= 1e-9

    def test_shift_equivariance(self, rng):
        y = rng.normal(0, 3, size=30)
        base = decompose(y, 3)
        shifted = decompose(y + 11.5, 3)
        assert np.allclose(shifted.trend, base.trend + 11.5, atol=1e-9)
        assert np.allclose(shifted.seasonal, base.seasonal, atol=1e-9)
        assert np.allclose(shifted.remainder, base.remainder, atol=1e-9)

    def test_too_short(self):
        with pytest.raises(InsufficientHistoryError):
            decompose(np.ones(8), 4)

    def test_even_period_uses_double_window(self):
        # centered 2x4 average of a pure 4-cycle is exactly zero
        y = np.tile([2.0, 0.0, -2.0, 0.0], 6)
        d = decompose(y, 4)
        assert np.allclose(d.trend[2:-2], 0.0, atol=1e-9)


class TestForecastComponents:
    def test_pure_seasonal_repeats(self):
        y = np.tile([1.0, -1.0], 10)
        d = decompose(y, 2)
        fc = forecast_components(d, 5)
        # series ends on phase (19 % 2) = odd, so the repeat starts back at phase 0
        assert np.allclose(fc, [1.0, -1.0, 1.0, -1.0, 1.0], atol=1e-9)

    def test_linear_trend_continuation(self):
        y = 3.0 * np.arange(1.0, 31.0)
        d = decompose(y, 2)
        fc = forecast_components(d, 4)
        assert np.allclose(fc, 3.0 * np.arange(31.0, 35.0), atol=1e-5)

    def test_superposition(self):
        i = np.arange(1.0, 41.0)
        seasonal = np.tile([2.0, -2.0], 20)
        d = decompose(3.0 * i + seasonal, 2)
        fc = forecast_components(d, 6)
        expected = 3.0 * np.arange(41.0, 47.0) + np.tile([2.0, -2.0], 3)
        assert np.allclose(fc, expected, atol=1e-4)


class TestRecompose:
    def test_zero_remainder(self):
        assert np.array_equal(recompose([0.0, 0.0], [3.0, 4.0]), [3.0, 4.0])

    def test_zero_components(self):
        assert np.array_equal(recompose([3.0, 4.0], [0.0, 0.0]), [3.0, 4.0])

    def test_elementwise_sum(self):
        assert np.array_equal(recompose([1.0, 2.0], [3.0, 4.0]), [4.0, 6.0])

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            recompose([1.0], [1.0, 2.0])
