"""Linear-interpolation smoothing of forecast grids.

Vertical smoothing pulls each origin's forecasts toward the forecasts
already made for the same targets at the previous origin; horizontal
smoothing pulls each horizon's forecast toward the previous horizon at the
same origin.  Both come in two flavours:

* ``partial`` interpolates against the previous *original* forecast:
  ``SF[k][j] = w * F[k-1][j+1] + (1 - w) * F[k][j]``
* ``full`` interpolates against the previous *stabilized* forecast,
  chaining all earlier origins/horizons:
  ``SF[k][j] = w * SF[k-1][j+1] + (1 - w) * F[k][j]``

Cells with nothing earlier to anchor to are copied verbatim: the whole
first origin row, the last horizon of every origin (vertical), and the
first horizon (horizontal).  At the second origin / second horizon the two
flavours coincide because the previous forecast is still un-stabilized.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import (
    FULL,
    HORIZONTAL,
    JOINT_HV,
    JOINT_VH,
    METHODS,
    VERTICAL,
    ForecastMatrix,
    ShapeError,
    StabilizationSpec,
    TimeSeries,
    as_float_array,
)
from .decompose import decompose, forecast_components, recompose


def _check_weight(weight: float) -> None:
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"interpolation weight {weight} outside [0, 1]")


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")


def stabilize_vertical(matrix: ForecastMatrix, weight: float, method: str) -> ForecastMatrix:
    """Smooth forecast revisions across origins.

    Row 1 and the horizon-h cell of every row are unchanged (they are the
    first forecasts ever made for their targets).  With ``full`` and
    weight 1 every other cell collapses onto the first forecast made for
    its target, which makes the revision-change measures exactly zero.
    """
    _check_weight(weight)
    _check_method(method)
    original = matrix.require_rows()
    smoothed = original.copy()
    n_origins, horizon = original.shape
    for k in range(1, n_origins):
        previous = smoothed[k - 1] if method == FULL else original[k - 1]
        smoothed[k, : horizon - 1] = (
            weight * previous[1:] + (1.0 - weight) * original[k, : horizon - 1]
        )
    return replace(matrix, rows=smoothed)


def stabilize_horizontal(forecast_row, weight: float, method: str) -> np.ndarray:
    """Smooth one origin's forecasts across the horizon; H1 anchors the row."""
    _check_weight(weight)
    _check_method(method)
    original = as_float_array(forecast_row)
    if original.shape[0] < 1:
        raise ShapeError("empty forecast row")
    smoothed = original.copy()
    for j in range(1, original.shape[0]):
        previous = smoothed[j - 1] if method == FULL else original[j - 1]
        smoothed[j] = weight * previous + (1.0 - weight) * original[j]
    return smoothed


def stabilize_rows_horizontal(matrix: ForecastMatrix, weight: float, method: str) -> ForecastMatrix:
    """Apply horizontal smoothing to every origin row of a grid."""
    rows = matrix.require_rows()
    smoothed = np.vstack([stabilize_horizontal(row, weight, method) for row in rows])
    return replace(matrix, rows=smoothed)


def stabilize_joint(
    matrix: ForecastMatrix,
    vertical_weight: float,
    horizontal_weight: float,
    order: str,
    method: str,
) -> ForecastMatrix:
    """Sequential composition of the two single-direction passes.

    The horizontal pass runs on the raw rows (not on decomposition
    remainders); use the remainder pipeline explicitly if seasonality
    should be preserved.
    """
    if order not in (JOINT_VH, JOINT_HV):
        raise ValueError(f"unknown joint order {order!r}")
    if order == JOINT_VH:
        out = stabilize_vertical(matrix, vertical_weight, method)
        return stabilize_rows_horizontal(out, horizontal_weight, method)
    out = stabilize_rows_horizontal(matrix, horizontal_weight, method)
    return stabilize_vertical(out, vertical_weight, method)


def stabilize(matrix: ForecastMatrix, spec: StabilizationSpec) -> ForecastMatrix:
    """Dispatch on a :class:`StabilizationSpec`."""
    if spec.direction == VERTICAL:
        return stabilize_vertical(matrix, spec.weight, spec.method)
    if spec.direction == HORIZONTAL:
        return stabilize_rows_horizontal(matrix, spec.weight, spec.method)
    return stabilize_joint(matrix, spec.weight, spec.second_weight, spec.direction, spec.method)


@dataclass(frozen=True)
class RemainderStabilization:
    """Result of the decompose / forecast / smooth / recompose pipeline.

    ``forecast`` is what gets scored for accuracy; ``remainder_forecast``
    (already smoothed) is what gets scored for stability, together with
    the in-sample ``remainder`` it should be scaled by.
    """

    forecast: np.ndarray
    remainder_forecast: np.ndarray
    component_forecast: np.ndarray
    remainder: np.ndarray


def stabilize_horizontal_on_remainder(
    series: TimeSeries,
    forecast_fn,
    horizon: int,
    weight: float,
    method: str,
) -> RemainderStabilization:
    """Horizontal smoothing that respects trend and seasonality.

    The series is decomposed, the base model forecasts only the remainder,
    the remainder forecast is smoothed horizontally, and the smoothed
    remainder is recomposed with the trend/seasonal continuations.
    ``forecast_fn(values, horizon) -> vector`` supplies the base model.
    """
    parts = decompose(series.values, series.seasonal_period)
    components = forecast_components(parts, horizon)
    remainder_forecast = as_float_array(forecast_fn(parts.remainder, horizon))
    smoothed_remainder = stabilize_horizontal(remainder_forecast, weight, method)
    return RemainderStabilization(
        forecast=recompose(smoothed_remainder, components),
        remainder_forecast=smoothed_remainder,
        component_forecast=components,
        remainder=parts.remainder,
    )
