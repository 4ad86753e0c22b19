"""Domain types and origin/horizon/target index algebra.

Conventions used throughout the package:

* Series values are 1-indexed in the math (``y_1 .. y_L``) but stored in
  0-based numpy arrays; "time" of an origin is the number of observations
  available at that origin, i.e. a 1-based index into the series.
* A forecast grid has ``O`` consecutive origins (step 1) and horizon ``h``;
  row ``k`` (1-based) holds the forecasts made at origin time
  ``first_origin_time + (k - 1)`` for the next ``h`` time points.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

VERTICAL = "vertical"
HORIZONTAL = "horizontal"
JOINT_VH = "joint_vh"
JOINT_HV = "joint_hv"
DIRECTIONS = (VERTICAL, HORIZONTAL, JOINT_VH, JOINT_HV)

PARTIAL = "partial"
FULL = "full"
METHODS = (PARTIAL, FULL)


class DataError(Exception):
    """Invalid input data (bad file, bad grid, not enough history)."""


class ParseError(DataError):
    pass


class FormatError(DataError):
    pass


class InsufficientHistoryError(DataError):
    pass


class FitError(DataError):
    pass


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class TimeSeries:
    """A univariate series with a seasonal period.

    ``values`` must be finite after ingestion; readers substitute missing
    observations before construction.
    """

    id: str
    values: np.ndarray
    seasonal_period: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ShapeError(f"series {self.id!r}: values must be 1-D")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"series {self.id!r}: non-finite values")
        if self.seasonal_period < 1:
            raise ValueError(f"series {self.id!r}: seasonal period must be >= 1")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Dataset:
    series: tuple[TimeSeries, ...]
    name: str = "dataset"
    frequency: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "series", tuple(self.series))
        ids = [s.id for s in self.series]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate series ids in dataset")
        periods = {s.seasonal_period for s in self.series}
        if len(periods) > 1:
            raise ValueError(f"series have mixed seasonal periods: {sorted(periods)}")

    @property
    def seasonal_period(self) -> int:
        if not self.series:
            raise ValueError("empty dataset has no seasonal period")
        return self.series[0].seasonal_period

    def __iter__(self):
        return iter(self.series)

    def __len__(self) -> int:
        return len(self.series)

    def get(self, series_id: str) -> TimeSeries:
        for s in self.series:
            if s.id == series_id:
                return s
        raise KeyError(series_id)


@dataclass(frozen=True)
class ForecastMatrix:
    """Per-series forecast grid indexed (origin, horizon).

    ``rows[k-1][j-1]`` is the forecast made at origin ``k`` for ``j`` steps
    ahead.  ``first_origin_time`` anchors origin 1 to a series time; it may
    be ``None`` for grids read from a bare CSV, in which case operations
    that need actuals anchor it via :func:`first_origin_time_for`.

    Rows are normally a read-only (O, h) float array.  Ragged input is kept
    as a list of 1-D arrays so :func:`validate` can report it as data
    rather than crash; numerical operations require the rectangular form.
    """

    series_id: str
    first_origin_time: int | None
    horizon: int
    rows: np.ndarray | list = field(repr=False)

    def __post_init__(self) -> None:
        try:
            arr = np.asarray(self.rows, dtype=np.float64)
            ok = arr.ndim == 2
        except (ValueError, TypeError):
            ok = False
        if ok:
            arr.setflags(write=False)
            object.__setattr__(self, "rows", arr)
        else:
            object.__setattr__(
                self, "rows", [np.asarray(r, dtype=np.float64) for r in self.rows]
            )

    @property
    def n_origins(self) -> int:
        return len(self.rows)

    @property
    def is_rectangular(self) -> bool:
        return isinstance(self.rows, np.ndarray)

    def origin_time(self, origin_index: int) -> int:
        if self.first_origin_time is None:
            raise ValueError(f"matrix {self.series_id!r} is not anchored to a series")
        if not 1 <= origin_index <= self.n_origins:
            raise IndexError(f"origin index {origin_index} out of range")
        return self.first_origin_time + origin_index - 1

    def anchored(self, first_origin_time: int) -> "ForecastMatrix":
        return replace(self, first_origin_time=first_origin_time)

    def require_rows(self) -> np.ndarray:
        if not self.is_rectangular:
            raise ShapeError(f"matrix {self.series_id!r} has ragged rows")
        if self.rows.size == 0:
            raise ShapeError(f"matrix {self.series_id!r} is empty")
        if self.rows.shape[1] != self.horizon:
            raise ShapeError(
                f"matrix {self.series_id!r}: rows have width {self.rows.shape[1]}, "
                f"declared horizon {self.horizon}"
            )
        return self.rows


@dataclass(frozen=True)
class StabilizationSpec:
    """How to smooth a forecast grid: direction, method, and weight(s).

    ``weight`` is the share given to the previous forecast (0 = leave the
    grid untouched, 1 = maximally stable).  Joint directions run the two
    passes sequentially and carry a second weight for the second pass.
    """

    direction: str
    method: str
    weight: float
    second_weight: float | None = None

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"weight {self.weight} outside [0, 1]")
        if self.direction in (JOINT_VH, JOINT_HV):
            if self.second_weight is None:
                raise ValueError("joint stabilization needs a second weight")
            if not 0.0 <= self.second_weight <= 1.0:
                raise ValueError(f"second weight {self.second_weight} outside [0, 1]")


def target_time(matrix: ForecastMatrix, origin_index: int, horizon_index: int) -> int:
    """Absolute series time a forecast cell refers to.

    Forecasts from distinct (origin, horizon) cells with the same target
    time are revisions of each other: origin k+1 at horizon j targets the
    same point as origin k at horizon j+1.
    """
    if not 1 <= origin_index <= matrix.n_origins:
        raise IndexError(f"origin index {origin_index} out of range 1..{matrix.n_origins}")
    if not 1 <= horizon_index <= matrix.horizon:
        raise IndexError(f"horizon index {horizon_index} out of range 1..{matrix.horizon}")
    if matrix.first_origin_time is None:
        raise ValueError(f"matrix {matrix.series_id!r} is not anchored to a series")
    return matrix.first_origin_time + (origin_index - 1) + horizon_index


def first_covering_origin(matrix: ForecastMatrix, target: int) -> tuple[int, int]:
    """(origin, horizon) of the earliest forecast made for ``target``."""
    t0 = matrix.first_origin_time
    if t0 is None:
        raise ValueError(f"matrix {matrix.series_id!r} is not anchored to a series")
    k = max(1, target - t0 - matrix.horizon + 1)
    j = target - t0 - (k - 1)
    if k > matrix.n_origins or not 1 <= j <= matrix.horizon:
        raise IndexError(f"target {target} not covered by any origin")
    return k, j


def first_origin_time_for(series_length: int, horizon: int, n_origins: int) -> int:
    """Placement rule: the last origin's window ends at the series end.

    Origin 1 therefore sits at ``L - h - (O - 1)``, which maximizes the
    training data available at every origin.
    """
    if n_origins < 1:
        raise ValueError("need at least one origin")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return series_length - horizon - (n_origins - 1)


def validate(matrix: ForecastMatrix, series: TimeSeries) -> list[str]:
    """Check every grid invariant against the series; violations are data.

    Returns an empty list for a well-formed grid.
    """
    violations: list[str] = []
    if matrix.series_id != series.id:
        violations.append(
            f"series id mismatch: matrix {matrix.series_id!r} vs series {series.id!r}"
        )
    n = matrix.n_origins
    if n < 1:
        violations.append("empty matrix: no origins")
        return violations
    if matrix.horizon < 1:
        violations.append(f"horizon {matrix.horizon} must be >= 1")
    if matrix.is_rectangular:
        if matrix.rows.shape[1] != matrix.horizon:
            violations.append(
                f"ragged row: rows have width {matrix.rows.shape[1]}, "
                f"declared horizon {matrix.horizon}"
            )
        if not np.all(np.isfinite(matrix.rows)):
            violations.append("non-finite forecast values")
    else:
        for k, row in enumerate(matrix.rows, start=1):
            if row.shape[0] != matrix.horizon:
                violations.append(
                    f"ragged row: origin {k} has {row.shape[0]} forecasts, expected {matrix.horizon}"
                )
    t0 = matrix.first_origin_time
    if t0 is not None:
        if t0 < 1:
            violations.append(f"first origin time {t0} leaves no training data")
        if t0 + (n - 1) + matrix.horizon > len(series):
            violations.append(
                "actuals missing: last origin's window extends past the series end "
                f"({t0} + {n - 1} + {matrix.horizon} > {len(series)})"
            )
    return violations


def clamp_nonnegative(matrix: ForecastMatrix) -> ForecastMatrix:
    """Opt-in post-step for count-like data; stabilization itself never clamps."""
    rows = np.maximum(matrix.require_rows(), 0.0)
    return replace(matrix, rows=rows)


def as_float_array(values: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError("expected a 1-D sequence")
    return arr
