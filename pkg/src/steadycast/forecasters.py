"""Built-in base models producing rolling-origin forecast grids.

Three models keep the pipeline self-contained: a seasonal naive repeat, an
additive level+trend exponential smoother, and a pooled lag regression
trained across all series.  Anything stronger comes in through the
external-forecast CSV instead.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Dataset,
    FitError,
    ForecastMatrix,
    InsufficientHistoryError,
    TimeSeries,
    as_float_array,
    first_origin_time_for,
)

logger = logging.getLogger(__name__)

RIDGE_JITTER = 1e-8
DEFAULT_LEVEL_SMOOTHING = 0.3
DEFAULT_TREND_SMOOTHING = 0.1
TUNE_GRID = [round(0.1 * g, 1) for g in range(1, 10)]


def lag_heuristic(seasonal_period: int) -> int:
    """Number of autoregressive lags: 1.25 seasonal periods, rounded up."""
    if seasonal_period < 1:
        raise ValueError("seasonal period must be >= 1")
    return math.ceil(1.25 * seasonal_period)


def seasonal_naive(values, seasonal_period: int, horizon: int) -> np.ndarray:
    """Repeat the last observed season."""
    y = as_float_array(values)
    m = seasonal_period
    if y.shape[0] < m:
        raise InsufficientHistoryError(
            f"seasonal naive needs {m} observations, got {y.shape[0]}"
        )
    steps = np.arange(horizon)
    return y[y.shape[0] - m + (steps % m)]


def holt_linear(
    values,
    horizon: int,
    level_smoothing: float = DEFAULT_LEVEL_SMOOTHING,
    trend_smoothing: float = DEFAULT_TREND_SMOOTHING,
) -> np.ndarray:
    """Additive level+trend exponential smoothing forecast.

    Initialized with level = y_1 and trend = y_2 - y_1, then for t >= 2:

        level_t = a * y_t + (1 - a) * (level_{t-1} + trend_{t-1})
        trend_t = b * (level_t - level_{t-1}) + (1 - b) * trend_{t-1}

    Forecast j steps ahead is level_L + j * trend_L.  An exactly linear
    series is a fixed point of the recursions for any smoothing values.
    """
    y = as_float_array(values)
    if y.shape[0] < 2:
        raise InsufficientHistoryError("level+trend smoothing needs >= 2 observations")
    if not (0.0 < level_smoothing < 1.0 and 0.0 < trend_smoothing < 1.0):
        raise ValueError("smoothing parameters must lie in (0, 1)")
    level = y[0]
    trend = y[1] - y[0]
    for t in range(1, y.shape[0]):
        prev_level = level
        level = level_smoothing * y[t] + (1.0 - level_smoothing) * (level + trend)
        trend = trend_smoothing * (level - prev_level) + (1.0 - trend_smoothing) * trend
    return level + trend * np.arange(1, horizon + 1)


def tune_holt(values) -> tuple[float, float]:
    """Grid-search smoothing parameters on in-sample one-step squared error."""
    y = as_float_array(values)
    best = (DEFAULT_LEVEL_SMOOTHING, DEFAULT_TREND_SMOOTHING)
    best_mse = math.inf
    for a in TUNE_GRID:
        for b in TUNE_GRID:
            level = y[0]
            trend = y[1] - y[0]
            sse = 0.0
            n = 0
            for t in range(1, y.shape[0]):
                if t >= 2:
                    sse += (level + trend - y[t]) ** 2
                    n += 1
                prev_level = level
                level = a * y[t] + (1.0 - a) * (level + trend)
                trend = b * (level - prev_level) + (1.0 - b) * trend
            if n and sse / n < best_mse:
                best_mse = sse / n
                best = (a, b)
    return best


@dataclass(frozen=True)
class PooledLagModel:
    """Linear autoregression fitted by pooling lag windows from all series."""

    n_lags: int
    coefficients: np.ndarray  # most recent lag first
    intercept: float

    def __post_init__(self) -> None:
        coef = np.asarray(self.coefficients, dtype=np.float64)
        if coef.shape != (self.n_lags,):
            raise ValueError("coefficient count must equal the lag count")
        if not (np.all(np.isfinite(coef)) and np.isfinite(self.intercept)):
            raise ValueError("non-finite fitted coefficients")
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)


def fit_pooled(training_sets, n_lags: int) -> PooledLagModel:
    """Least squares of y_t on its previous ``n_lags`` values plus intercept.

    All windows from all series are pooled into one design matrix; the
    normal equations get a tiny ridge term on the diagonal for
    conditioning.
    """
    if n_lags < 1:
        raise ValueError("lag count must be >= 1")
    rows = []
    targets = []
    for values in training_sets:
        y = as_float_array(values)
        for t in range(n_lags, y.shape[0]):
            rows.append(y[t - n_lags : t][::-1])  # most recent lag first
            targets.append(y[t])
    if not rows:
        raise FitError(f"no usable training windows for {n_lags} lags")
    design = np.column_stack([np.asarray(rows), np.ones(len(rows))])
    response = np.asarray(targets)
    gram = design.T @ design
    gram[np.diag_indices_from(gram)] += RIDGE_JITTER
    beta = np.linalg.solve(gram, design.T @ response)
    return PooledLagModel(n_lags=n_lags, coefficients=beta[:-1], intercept=beta[-1])


def predict_iterated(model: PooledLagModel, values, horizon: int) -> np.ndarray:
    """Multi-step forecast feeding each one-step prediction back as input."""
    y = as_float_array(values)
    if y.shape[0] < model.n_lags:
        raise InsufficientHistoryError(
            f"iterated prediction needs {model.n_lags} observations, got {y.shape[0]}"
        )
    window = list(y[-model.n_lags :][::-1])  # most recent first
    out = np.empty(horizon)
    for j in range(horizon):
        nxt = float(np.dot(model.coefficients, window)) + model.intercept
        out[j] = nxt
        window = [nxt] + window[:-1]
    return out


def min_history(model_name: str, seasonal_period: int) -> int:
    if model_name == "snaive":
        return seasonal_period
    if model_name == "holt":
        return 2
    if model_name == "pooled":
        return lag_heuristic(seasonal_period) + 1
    raise ValueError(f"unknown model {model_name!r}")


def make_local_forecaster(model_name: str, seasonal_period: int, tune: bool = False):
    """Return ``forecast_fn(values, horizon)`` for a local model."""
    if model_name == "snaive":
        return lambda values, horizon: seasonal_naive(values, seasonal_period, horizon)
    if model_name == "holt":
        if tune:
            def tuned(values, horizon):
                a, b = tune_holt(values)
                return holt_linear(values, horizon, a, b)
            return tuned
        return lambda values, horizon: holt_linear(values, horizon)
    raise ValueError(f"unknown local model {model_name!r}")


def rolling_origin_forecasts(
    dataset: Dataset,
    model_name: str,
    horizon: int,
    n_origins: int,
    tune: bool = False,
    pooled_mean_scaling: bool = False,
) -> tuple[dict[str, ForecastMatrix], list[tuple[str, str]]]:
    """Forecast every series at ``n_origins`` consecutive origins.

    Local models are refitted per origin on the data available then; the
    pooled model is refitted once per origin over all usable series.
    Series too short for the placement rule or the model are skipped and
    reported rather than failing the run.

    ``pooled_mean_scaling`` divides each series by its training-window
    mean before pooling and scales the forecasts back; off by default.
    """
    m = dataset.seasonal_period
    skipped: list[tuple[str, str]] = []
    usable: list[TimeSeries] = []
    for s in dataset:
        t_first = first_origin_time_for(len(s), horizon, n_origins)
        if t_first < min_history(model_name, m):
            skipped.append(
                (s.id, f"needs {min_history(model_name, m)} observations at origin 1, has {t_first}")
            )
            continue
        usable.append(s)
    for series_id, reason in skipped:
        logger.warning("skipping series %s: %s", series_id, reason)
    if not usable:
        return {}, skipped

    matrices: dict[str, ForecastMatrix] = {}
    if model_name == "pooled":
        n_lags = lag_heuristic(m)
        rows_by_id: dict[str, list[np.ndarray]] = {s.id: [] for s in usable}
        for k in range(1, n_origins + 1):
            prefixes = {
                s.id: s.values[: first_origin_time_for(len(s), horizon, n_origins) + k - 1]
                for s in usable
            }
            scales = {sid: 1.0 for sid in prefixes}
            if pooled_mean_scaling:
                for sid, values in prefixes.items():
                    mean = float(values.mean())
                    scales[sid] = mean if mean != 0.0 else 1.0
                prefixes = {sid: values / scales[sid] for sid, values in prefixes.items()}
            model = fit_pooled(list(prefixes.values()), n_lags)
            for s in usable:
                rows_by_id[s.id].append(
                    scales[s.id] * predict_iterated(model, prefixes[s.id], horizon)
                )
        for s in usable:
            matrices[s.id] = ForecastMatrix(
                series_id=s.id,
                first_origin_time=first_origin_time_for(len(s), horizon, n_origins),
                horizon=horizon,
                rows=np.vstack(rows_by_id[s.id]),
            )
        return matrices, skipped

    forecast_fn = make_local_forecaster(model_name, m, tune=tune)
    for s in usable:
        t_first = first_origin_time_for(len(s), horizon, n_origins)
        rows = [
            forecast_fn(s.values[: t_first + k - 1], horizon)
            for k in range(1, n_origins + 1)
        ]
        matrices[s.id] = ForecastMatrix(
            series_id=s.id,
            first_origin_time=t_first,
            horizon=horizon,
            rows=np.vstack(rows),
        )
    return matrices, skipped
