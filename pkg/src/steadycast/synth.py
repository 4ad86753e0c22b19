"""Seeded synthetic datasets (level + trend + seasonality + noise)."""

from __future__ import annotations

import numpy as np

from .core import Dataset, TimeSeries


def synthetic_dataset(
    n_series: int,
    length: int,
    seasonal_period: int,
    seed: int = 0,
    name: str = "synthetic",
) -> Dataset:
    rng = np.random.default_rng(seed)
    m = seasonal_period
    t = np.arange(length)
    series = []
    for i in range(n_series):
        level = rng.uniform(20.0, 80.0)
        slope = rng.normal(0.0, 0.08)
        amplitude = rng.uniform(2.0, 8.0)
        phase = rng.integers(0, m) if m > 1 else 0
        pattern = amplitude * np.sin(2.0 * np.pi * (np.arange(m) + phase) / max(m, 2))
        pattern -= pattern.mean()
        noise = rng.normal(0.0, rng.uniform(0.5, 1.5), size=length)
        values = level + slope * t + pattern[t % m] + noise
        series.append(TimeSeries(id=f"S{i + 1:03d}", values=values, seasonal_period=m))
    return Dataset(series=tuple(series), name=name)


def parse_synth_spec(spec: str) -> tuple[int, int]:
    """``synth:<n_series>x<length>`` -> (n_series, length)."""
    body = spec.split(":", 1)[1]
    n, _, length = body.partition("x")
    return int(n), int(length)
