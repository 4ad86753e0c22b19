import numpy as np
import pytest

from steadycast.core import (
    Dataset,
    ForecastMatrix,
    TimeSeries,
    first_covering_origin,
    first_origin_time_for,
    target_time,
    validate,
)


def make_matrix(t0=10, n_origins=3, horizon=6):
    rows = np.arange(n_origins * horizon, dtype=float).reshape(n_origins, horizon)
    return ForecastMatrix("s1", t0, horizon, rows)


class TestTargetTime:
    def test_first_forecast_one_step_past_origin(self):
        assert target_time(make_matrix(t0=10), 1, 1) == 11

    def test_adjacent_origins_overlap(self):
        m = make_matrix(t0=10)
        assert target_time(m, 2, 5) == 16
        assert target_time(m, 1, 6) == 16

    def test_third_origin_overlaps_first(self):
        # origin 3 advanced two steps, so H1-H4 align with H3-H6 of origin 1
        m = make_matrix(t0=10)
        assert target_time(m, 3, 4) == 16
        assert target_time(m, 3, 4) == target_time(m, 1, 6)
        assert target_time(m, 3, 5) == target_time(m, 1, 6) + 1

    def test_out_of_range(self):
        m = make_matrix()
        with pytest.raises(IndexError):
            target_time(m, 0, 1)
        with pytest.raises(IndexError):
            target_time(m, 4, 1)
        with pytest.raises(IndexError):
            target_time(m, 1, 7)

    def test_strictly_increasing_unit_steps(self):
        m = make_matrix()
        for k in range(1, 4):
            targets = [target_time(m, k, j) for j in range(1, 7)]
            assert targets == list(range(targets[0], targets[0] + 6))
        for j in range(1, 7):
            targets = [target_time(m, k, j) for k in range(1, 4)]
            assert targets == list(range(targets[0], targets[0] + 3))

    def test_coverage_counts_match_enumeration(self):
        # brute-force enumeration of all (k, j) cells for O=3, h=6
        m = make_matrix(t0=10, n_origins=3, horizon=6)
        counts = {}
        for k in range(1, 4):
            for j in range(1, 7):
                counts[target_time(m, k, j)] = counts.get(target_time(m, k, j), 0) + 1
        assert sorted(counts) == list(range(11, 19))
        for target, n in counts.items():
            # coverage grows to min(O, h) then shrinks at the far boundary
            expected = min(3, 6, target - 10, 10 + 3 + 6 - target)
            assert n == expected

    def test_first_covering_origin_matches_scan(self):
        m = make_matrix(t0=10, n_origins=3, horizon=6)
        for target in range(11, 19):
            k0, j0 = first_covering_origin(m, target)
            # scanning origins in order must find the same cell
            for k in range(1, 4):
                j = target - (10 + k - 1)
                if 1 <= j <= 6:
                    assert (k0, j0) == (k, j)
                    break


class TestPlacement:
    def test_final_window_ends_at_series_end(self):
        t0 = first_origin_time_for(series_length=100, horizon=6, n_origins=13)
        assert t0 == 100 - 6 - 12
        assert t0 + (13 - 1) + 6 == 100

    def test_single_origin(self):
        assert first_origin_time_for(20, 5, 1) == 15


class TestValidate:
    def series(self, n=20):
        return TimeSeries("s1", np.arange(1.0, n + 1.0), seasonal_period=2)

    def test_well_formed(self):
        m = ForecastMatrix("s1", 10, 3, np.ones((3, 3)))
        assert validate(m, self.series(20)) == []

    def test_ragged_row(self):
        m = ForecastMatrix("s1", 10, 3, [[1.0, 2.0, 3.0], [1.0, 2.0]])
        violations = validate(m, self.series(20))
        assert any("ragged row" in v for v in violations)

    def test_actuals_missing_boundary(self):
        # t0 + (O-1) + h == L + 1: exactly one step past the end
        series = self.series(14)
        m = ForecastMatrix("s1", 10, 3, np.ones((3, 3)))
        violations = validate(m, series)
        assert len([v for v in violations if "actuals missing" in v]) == 1
        # one observation more and the matrix fits
        assert validate(m, self.series(15)) == []

    def test_id_mismatch(self):
        m = ForecastMatrix("other", 10, 3, np.ones((3, 3)))
        assert any("mismatch" in v for v in validate(m, self.series()))


class TestTypes:
    def test_series_rejects_nan(self):
        with pytest.raises(ValueError):
            TimeSeries("s", np.array([1.0, np.nan]), 1)

    def test_series_values_read_only(self):
        s = TimeSeries("s", np.array([1.0, 2.0]), 1)
        with pytest.raises(ValueError):
            s.values[0] = 5.0

    def test_dataset_rejects_duplicate_ids(self):
        a = TimeSeries("s", np.ones(4), 1)
        with pytest.raises(ValueError):
            Dataset(series=(a, a))

    def test_dataset_rejects_mixed_periods(self):
        a = TimeSeries("a", np.ones(4), 1)
        b = TimeSeries("b", np.ones(4), 2)
        with pytest.raises(ValueError):
            Dataset(series=(a, b))


class TestStabilizationSpec:
    def test_joint_requires_second_weight(self):
        from steadycast.core import StabilizationSpec

        with pytest.raises(ValueError, match="second weight"):
            StabilizationSpec("joint_vh", "full", 0.5)
        StabilizationSpec("joint_vh", "full", 0.5, 0.3)

    def test_weight_bounds(self):
        from steadycast.core import StabilizationSpec

        with pytest.raises(ValueError):
            StabilizationSpec("vertical", "full", 1.1)
        with pytest.raises(ValueError):
            StabilizationSpec("vertical", "partial", -0.2)

    def test_unknown_direction_and_method(self):
        from steadycast.core import StabilizationSpec

        with pytest.raises(ValueError):
            StabilizationSpec("diagonal", "full", 0.5)
        with pytest.raises(ValueError):
            StabilizationSpec("vertical", "half", 0.5)


class TestClamp:
    def test_floors_at_zero_only_when_asked(self):
        from steadycast.core import clamp_nonnegative

        m = ForecastMatrix("s", 5, 2, np.array([[1.0, -2.0], [-0.5, 3.0]]))
        clamped = clamp_nonnegative(m)
        assert np.array_equal(clamped.rows, [[1.0, 0.0], [0.0, 3.0]])
        assert np.array_equal(m.rows, [[1.0, -2.0], [-0.5, 3.0]])
