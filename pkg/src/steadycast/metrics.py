"""Scaled accuracy and stability measures, per (series, origin).

Every scaled measure divides by the in-sample error of the lag-m naive
forecast on the training data available at the relevant origin, which
makes values comparable across series of different magnitudes:

* MASE / RMSSE score forecasts against actuals.
* MASC / RMSSC score the change between the forecasts two adjacent
  origins made for the same targets (vertical) or between adjacent
  horizons of one origin (horizontal); sMAPC is the percentage analogue.
* The ``_I`` variants score the change against the first forecast ever
  made for each target (vertical) or against the first-horizon forecast
  (horizontal).

A zero scaling denominator marks the value undefined (with a reason)
instead of returning infinity, so aggregates stay finite and auditable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ForecastMatrix,
    InsufficientHistoryError,
    ShapeError,
    as_float_array,
    first_covering_origin,
    target_time,
)

ACCURACY_KINDS = ("MASE", "RMSSE", "sMAPE")
CHANGE_KINDS = ("MASC", "RMSSC", "sMAPC")

VERTICAL_METRICS = ("sMAPC", "MASC_V", "RMSSC_V", "MASC_I_V", "RMSSC_I_V")
HORIZONTAL_METRICS = ("MASC_H", "RMSSC_H", "MASC_I_H", "RMSSC_I_H")
ALL_METRICS = ACCURACY_KINDS + VERTICAL_METRICS + HORIZONTAL_METRICS

ZERO_DENOMINATOR = "zero scaling denominator"
NO_OVERLAP = "no overlapping horizons (h = 1)"


@dataclass(frozen=True)
class MetricReport:
    """One measured value for one (series, origin); ``value`` is None when
    the measure is undefined and ``reason`` says why."""

    series_id: str
    origin_index: int
    metric: str
    value: float | None
    reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.value is not None


def naive_scale(training, seasonal_period: int, squared: bool = False) -> float:
    """Mean in-sample error of the lag-m naive forecast on the training data."""
    y = as_float_array(training)
    m = seasonal_period
    if y.shape[0] <= m:
        raise InsufficientHistoryError(
            f"scaled metrics need training length > {m}, got {y.shape[0]}"
        )
    diffs = y[m:] - y[:-m]
    return float(np.mean(diffs**2)) if squared else float(np.mean(np.abs(diffs)))


def _symmetric_percentage(a: np.ndarray, b: np.ndarray) -> float:
    """200/n * sum |a-b| / (|a|+|b|), with 0/0 terms defined as 0."""
    num = np.abs(a - b)
    den = np.abs(a) + np.abs(b)
    terms = np.divide(num, den, out=np.zeros_like(num), where=den != 0)
    return float(200.0 * terms.mean())


def accuracy(kind: str, actuals, forecasts, training, seasonal_period: int) -> float | None:
    """MASE, RMSSE or sMAPE of one origin's forecasts against actuals."""
    y = as_float_array(actuals)
    f = as_float_array(forecasts)
    if y.shape != f.shape:
        raise ShapeError("actuals and forecasts differ in length")
    if kind == "sMAPE":
        return _symmetric_percentage(y, f)
    if kind == "MASE":
        scale = naive_scale(training, seasonal_period, squared=False)
        return float(np.mean(np.abs(y - f)) / scale) if scale != 0.0 else None
    if kind == "RMSSE":
        scale = naive_scale(training, seasonal_period, squared=True)
        return float(np.sqrt(np.mean((y - f) ** 2) / scale)) if scale != 0.0 else None
    raise ValueError(f"unknown accuracy kind {kind!r}")


def vertical_change(
    kind: str,
    current_row,
    previous_row,
    training,
    seasonal_period: int,
) -> float | None:
    """Change between two adjacent origins' forecasts for the same targets.

    Horizons 1..h-1 of the current origin overlap horizons 2..h of the
    previous one.  ``training`` is the series prefix available at the
    previous origin, which supplies the scaling.
    """
    cur = as_float_array(current_row)
    prev = as_float_array(previous_row)
    if cur.shape != prev.shape:
        raise ShapeError("origin rows differ in length")
    h = cur.shape[0]
    if h < 2:
        return None
    a = cur[: h - 1]
    b = prev[1:]
    if kind == "sMAPC":
        return _symmetric_percentage(a, b)
    if kind == "MASC":
        scale = naive_scale(training, seasonal_period, squared=False)
        return float(np.mean(np.abs(a - b)) / scale) if scale != 0.0 else None
    if kind == "RMSSC":
        scale = naive_scale(training, seasonal_period, squared=True)
        return float(np.sqrt(np.mean((a - b) ** 2) / scale)) if scale != 0.0 else None
    raise ValueError(f"unknown change kind {kind!r}")


def first_forecasts_for_targets(matrix: ForecastMatrix, origin_index: int) -> np.ndarray:
    """First forecast ever made (within this grid) for each of the first
    h-1 targets of the given origin."""
    h = matrix.horizon
    rows = matrix.require_rows()
    out = np.empty(h - 1)
    for i in range(1, h):
        k0, j0 = first_covering_origin(matrix, target_time(matrix, origin_index, i))
        out[i - 1] = rows[k0 - 1, j0 - 1]
    return out


def vertical_change_initial(
    kind: str,
    matrix: ForecastMatrix,
    origin_index: int,
    training,
    seasonal_period: int,
) -> float | None:
    """Change against the first forecast made for each target (MASC_I/RMSSC_I)."""
    if origin_index < 2:
        raise ValueError("initial-change measures need origin index >= 2")
    rows = matrix.require_rows()
    h = matrix.horizon
    if h < 2:
        return None
    current = rows[origin_index - 1, : h - 1]
    first = first_forecasts_for_targets(matrix, origin_index)
    if kind == "MASC":
        scale = naive_scale(training, seasonal_period, squared=False)
        return float(np.mean(np.abs(current - first)) / scale) if scale != 0.0 else None
    if kind == "RMSSC":
        scale = naive_scale(training, seasonal_period, squared=True)
        return float(np.sqrt(np.mean((current - first) ** 2) / scale)) if scale != 0.0 else None
    raise ValueError(f"unknown change kind {kind!r}")


def horizontal_change(
    kind: str,
    row,
    training,
    seasonal_period: int,
    variant: str = "adjacent",
) -> float | None:
    """Change across the horizon of one origin's forecasts.

    ``adjacent`` compares each horizon to the previous one; ``initial``
    compares every later horizon to the first.  ``training`` is the series
    prefix available at the origin itself.
    """
    f = as_float_array(row)
    h = f.shape[0]
    if h < 2:
        return None
    if variant == "adjacent":
        changes = f[1:] - f[:-1]
    elif variant == "initial":
        changes = f[1:] - f[0]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if kind == "MASC":
        scale = naive_scale(training, seasonal_period, squared=False)
        return float(np.mean(np.abs(changes)) / scale) if scale != 0.0 else None
    if kind == "RMSSC":
        scale = naive_scale(training, seasonal_period, squared=True)
        return float(np.sqrt(np.mean(changes**2) / scale)) if scale != 0.0 else None
    raise ValueError(f"unknown change kind {kind!r}")


@dataclass(frozen=True)
class AggregateStat:
    mean: float | None
    n_defined: int
    n_undefined: int


def aggregate(reports) -> dict[str, AggregateStat]:
    """Arithmetic mean per metric over all defined (series, origin) values.

    Undefined entries are excluded but counted.  Summation follows the
    order of the input list, so identical inputs aggregate identically.
    """
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    undefined: dict[str, int] = {}
    for r in reports:
        if r.defined:
            sums[r.metric] = sums.get(r.metric, 0.0) + r.value
            counts[r.metric] = counts.get(r.metric, 0) + 1
        else:
            undefined[r.metric] = undefined.get(r.metric, 0) + 1
    out: dict[str, AggregateStat] = {}
    for metric in sorted(set(sums) | set(undefined)):
        n = counts.get(metric, 0)
        out[metric] = AggregateStat(
            mean=sums[metric] / n if n else None,
            n_defined=n,
            n_undefined=undefined.get(metric, 0),
        )
    return out


def accuracy_reports(
    matrix: ForecastMatrix, series, seasonal_period: int
) -> list[MetricReport]:
    """MASE/RMSSE/sMAPE for every origin of an anchored grid."""
    values = as_float_array(series.values if hasattr(series, "values") else series)
    rows = matrix.require_rows()
    out: list[MetricReport] = []
    for k in range(1, matrix.n_origins + 1):
        t = matrix.origin_time(k)
        actuals = values[t : t + matrix.horizon]
        training = values[:t]
        for kind in ACCURACY_KINDS:
            v = accuracy(kind, actuals, rows[k - 1], training, seasonal_period)
            out.append(
                MetricReport(
                    matrix.series_id, k, kind, v, None if v is not None else ZERO_DENOMINATOR
                )
            )
    return out


def vertical_stability_reports(
    matrix: ForecastMatrix, series, seasonal_period: int
) -> list[MetricReport]:
    """All vertical change measures for origins 2..O of an anchored grid."""
    values = as_float_array(series.values if hasattr(series, "values") else series)
    rows = matrix.require_rows()
    out: list[MetricReport] = []
    no_overlap = matrix.horizon < 2
    for k in range(2, matrix.n_origins + 1):
        training = values[: matrix.origin_time(k) - 1]
        pairs = [
            ("sMAPC", vertical_change("sMAPC", rows[k - 1], rows[k - 2], training, seasonal_period)),
            ("MASC_V", vertical_change("MASC", rows[k - 1], rows[k - 2], training, seasonal_period)),
            ("RMSSC_V", vertical_change("RMSSC", rows[k - 1], rows[k - 2], training, seasonal_period)),
            ("MASC_I_V", vertical_change_initial("MASC", matrix, k, training, seasonal_period)),
            ("RMSSC_I_V", vertical_change_initial("RMSSC", matrix, k, training, seasonal_period)),
        ]
        for name, v in pairs:
            reason = None if v is not None else (NO_OVERLAP if no_overlap else ZERO_DENOMINATOR)
            out.append(MetricReport(matrix.series_id, k, name, v, reason))
    return out


def horizontal_stability_reports(
    series_id: str,
    origin_index: int,
    row,
    training,
    seasonal_period: int,
) -> list[MetricReport]:
    """All horizontal change measures for one origin's row."""
    no_overlap = len(as_float_array(row)) < 2
    pairs = [
        ("MASC_H", horizontal_change("MASC", row, training, seasonal_period, "adjacent")),
        ("RMSSC_H", horizontal_change("RMSSC", row, training, seasonal_period, "adjacent")),
        ("MASC_I_H", horizontal_change("MASC", row, training, seasonal_period, "initial")),
        ("RMSSC_I_H", horizontal_change("RMSSC", row, training, seasonal_period, "initial")),
    ]
    out = []
    for name, v in pairs:
        reason = None if v is not None else (NO_OVERLAP if no_overlap else ZERO_DENOMINATOR)
        out.append(MetricReport(series_id, origin_index, name, v, reason))
    return out
