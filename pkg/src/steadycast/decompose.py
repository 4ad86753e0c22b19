"""Classical additive seasonal-trend decomposition.

Single seasonal period, moving-average trend, phase-mean seasonal indices.
This deliberately trades the flexibility of iterated-smoother decompositions
for a dependency-free method whose components always add back exactly to
the input, which the recomposition pipeline relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InsufficientHistoryError, ShapeError, as_float_array
from .forecasters import holt_linear


@dataclass(frozen=True)
class Decomposition:
    trend: np.ndarray
    seasonal: np.ndarray
    remainder: np.ndarray
    seasonal_period: int

    @property
    def length(self) -> int:
        return self.trend.shape[0]


def _centered_trend(values: np.ndarray, period: int) -> np.ndarray:
    """Centered moving average; even periods use the 2xm average."""
    if period == 1:
        return values.astype(np.float64, copy=True)
    if period % 2 == 0:
        weights = np.full(period + 1, 1.0 / period)
        weights[0] = weights[-1] = 0.5 / period
    else:
        weights = np.full(period, 1.0 / period)
    interior = np.convolve(values, weights, mode="valid")
    half = (len(weights) - 1) // 2
    trend = np.full(values.shape[0], np.nan)
    trend[half : half + interior.shape[0]] = interior
    return trend


def _fill_edges(trend: np.ndarray, period: int) -> np.ndarray:
    """Extend the trend to the series ends by straight-line extrapolation.

    Fits a line through the nearest ``period`` interior trend values on
    each side; keeps recomposition exact where the moving average is
    undefined.
    """
    defined = np.flatnonzero(np.isfinite(trend))
    first, last = defined[0], defined[-1]
    filled = trend.copy()
    n_fit = min(period, last - first + 1)
    if first > 0:
        xs = np.arange(first, first + n_fit)
        slope, intercept = np.polyfit(xs, trend[xs], 1)
        left = np.arange(0, first)
        filled[left] = slope * left + intercept
    if last < trend.shape[0] - 1:
        xs = np.arange(last - n_fit + 1, last + 1)
        slope, intercept = np.polyfit(xs, trend[xs], 1)
        right = np.arange(last + 1, trend.shape[0])
        filled[right] = slope * right + intercept
    return filled


def decompose(values, seasonal_period: int) -> Decomposition:
    """Split a series into trend + seasonal + remainder (exactly additive).

    Seasonal indices are the per-phase means of the detrended series,
    re-centered to sum to zero over one period.
    """
    y = as_float_array(values)
    m = seasonal_period
    if m < 1:
        raise ValueError("seasonal period must be >= 1")
    if y.shape[0] < 2 * m + 1:
        raise InsufficientHistoryError(
            f"need at least {2 * m + 1} observations to decompose with period {m}"
        )
    trend = _fill_edges(_centered_trend(y, m), m)
    detrended = y - trend
    phases = np.arange(y.shape[0]) % m
    indices = np.array([detrended[phases == q].mean() for q in range(m)])
    indices -= indices.mean()
    seasonal = indices[phases]
    remainder = y - trend - seasonal
    trend.setflags(write=False)
    seasonal.setflags(write=False)
    remainder.setflags(write=False)
    return Decomposition(trend, seasonal, remainder, m)


def forecast_components(parts: Decomposition, horizon: int) -> np.ndarray:
    """Continue trend and seasonality past the sample.

    Seasonality repeats the last observed period; the trend is continued
    with additive level+trend exponential smoothing.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    m = parts.seasonal_period
    last_period = parts.seasonal[parts.length - m :]
    steps = np.arange(horizon)
    seasonal_fc = last_period[steps % m]
    trend_fc = holt_linear(parts.trend, horizon)
    return trend_fc + seasonal_fc


def recompose(remainder_forecast, component_forecast) -> np.ndarray:
    r = as_float_array(remainder_forecast)
    c = as_float_array(component_forecast)
    if r.shape != c.shape:
        raise ShapeError(f"length mismatch: {r.shape[0]} vs {c.shape[0]}")
    return r + c
