"""CSV ingestion/emission and run configuration.

Formats (all plain CSV, UTF-8, header required):

* long data:      ``series_id,value`` or ``series_id,timestamp,value``
* forecast grid:  ``series_id,origin_index,horizon,forecast`` (dense)
* results table:  ``model,variant,w_s,metric,value`` (6 significant digits)
* raw values:     ``variant,series_id,origin_index,metric,value,reason``
* trade-off pts:  ``label,accuracy,stability``

The config file is flat ``key = value`` text with ``#`` comments; keys are
the CLI flag names with underscores and every key can be overridden by the
flag of the same name.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .core import (
    Dataset,
    ForecastMatrix,
    FormatError,
    ParseError,
    TimeSeries,
)

DEFAULT_GRID = (0.2, 0.4, 0.5, 0.6, 0.8, 1.0)
DEFAULT_ALPHA = 0.05


@dataclass
class RunConfig:
    """Everything a pipeline run needs; mirrors the CLI flags one-to-one."""

    data: str = ""
    m: int = 1
    horizon: int = 6
    origins: int = 13
    model: str = "snaive"
    grid: tuple[float, ...] = DEFAULT_GRID
    direction: str = "vertical"
    methods: tuple[str, ...] = ("partial", "full")
    out_dir: str = "."
    delta_max: float | None = None
    alpha: float = DEFAULT_ALPHA
    comparisons: int = 1
    jobs: int = 1
    seed: int = 0
    tune: bool = False
    clamp: bool = False

    def __post_init__(self) -> None:
        for w in self.grid:
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"grid weight {w} outside [0, 1]")
        if self.comparisons < 1:
            raise ValueError("comparison count must be >= 1")


_LIST_KEYS = {"grid": float, "methods": str}
_BOOL_KEYS = {"tune", "clamp"}


def read_config(path) -> dict[str, object]:
    """Parse a flat ``key = value`` config file into typed values."""
    typed: dict[str, object] = {}
    known = {f.name: f.type for f in fields(RunConfig)}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read config {path}: {e}") from e
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ParseError(f"{path}:{lineno}: unknown config key {key!r}")
        typed[key] = _coerce(key, value, path, lineno)
    return typed


def _coerce(key: str, value: str, path, lineno: int):
    try:
        if key in _LIST_KEYS:
            cast = _LIST_KEYS[key]
            return tuple(cast(part.strip()) for part in value.split(",") if part.strip())
        if key in _BOOL_KEYS:
            if value.lower() in ("true", "1", "yes", "on"):
                return True
            if value.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(value)
        default = getattr(RunConfig(), key)
        if key == "delta_max":
            return float(value)
        if isinstance(default, bool):
            return value.lower() in ("true", "1", "yes", "on")
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
        return value
    except ValueError as e:
        raise ParseError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from e


def build_config(file_values: dict[str, object], overrides: dict[str, object]) -> RunConfig:
    """File values first, CLI overrides on top, defaults underneath."""
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**merged)


def _sort_key(timestamp: str):
    try:
        return (0, float(timestamp), "")
    except ValueError:
        return (1, 0.0, timestamp)


def read_long_csv(path, seasonal_period: int, name: str | None = None) -> Dataset:
    """Read a long-format dataset; missing/NA values become 0.0 with a warning."""
    try:
        f = open(path, newline="")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: empty file")
        header = [h.strip().lower() for h in header]
        if header == ["series_id", "value"]:
            has_timestamp = False
        elif header == ["series_id", "timestamp", "value"]:
            has_timestamp = True
        else:
            raise ParseError(
                f"{path}: expected header 'series_id,value' or "
                f"'series_id,timestamp,value', got {','.join(header)}"
            )
        rows: dict[str, list] = {}
        seen: dict[tuple[str, str], int] = {}
        substituted = 0
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            expected = 3 if has_timestamp else 2
            if len(record) != expected:
                raise ParseError(f"{path}:{lineno}: expected {expected} columns")
            sid = record[0].strip()
            cell = record[-1].strip()
            if cell == "" or cell.upper() == "NA":
                value = 0.0
                substituted += 1
            else:
                try:
                    value = float(cell)
                except ValueError as e:
                    raise ParseError(f"{path}:{lineno}: non-numeric value {cell!r}") from e
                if not np.isfinite(value):
                    raise ParseError(f"{path}:{lineno}: non-finite value {cell!r}")
            if has_timestamp:
                stamp = record[1].strip()
                key = (sid, stamp)
                if key in seen:
                    raise ParseError(
                        f"{path}:{lineno}: duplicate (series_id, timestamp) "
                        f"({sid!r}, {stamp!r}), first seen at row {seen[key]}"
                    )
                seen[key] = lineno
                rows.setdefault(sid, []).append((stamp, value))
            else:
                rows.setdefault(sid, []).append(value)
    if substituted:
        warnings.warn(f"{path}: replaced {substituted} missing/NA values with 0.0")
    series = []
    for sid, items in rows.items():
        if has_timestamp:
            items = [v for _, v in sorted(items, key=lambda p: _sort_key(p[0]))]
        series.append(TimeSeries(id=sid, values=np.asarray(items), seasonal_period=seasonal_period))
    return Dataset(series=tuple(series), name=name or Path(path).stem)


def read_forecast_csv(path) -> dict[str, ForecastMatrix]:
    """Read forecast grids; each series must densely cover origins x horizons."""
    try:
        f = open(path, newline="")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    cells: dict[str, dict[tuple[int, int], float]] = {}
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != [
            "series_id",
            "origin_index",
            "horizon",
            "forecast",
        ]:
            raise FormatError(
                f"{path}: expected header 'series_id,origin_index,horizon,forecast'"
            )
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 columns")
            sid = record[0].strip()
            try:
                origin = int(record[1])
                horizon = int(record[2])
                value = float(record[3])
            except ValueError as e:
                raise FormatError(f"{path}:{lineno}: bad cell: {e}") from e
            key = (origin, horizon)
            grid = cells.setdefault(sid, {})
            if key in grid:
                raise FormatError(
                    f"{path}:{lineno}: duplicate forecast {sid} origin {origin} horizon {horizon}"
                )
            grid[key] = value
    matrices: dict[str, ForecastMatrix] = {}
    for sid, grid in cells.items():
        n_origins = max(k for k, _ in grid)
        h = max(j for _, j in grid)
        rows = np.empty((n_origins, h))
        for k in range(1, n_origins + 1):
            for j in range(1, h + 1):
                if (k, j) not in grid:
                    raise FormatError(f"missing forecast {sid} origin {k} horizon {j}")
                rows[k - 1, j - 1] = grid[(k, j)]
        matrices[sid] = ForecastMatrix(
            series_id=sid, first_origin_time=None, horizon=h, rows=rows
        )
    return matrices


def write_forecast_csv(matrices, path) -> None:
    """Write forecast grids with full float precision (round-trips exactly)."""
    items = matrices.values() if isinstance(matrices, dict) else matrices
    try:
        f = open(path, "w", newline="")
    except OSError as e:
        raise ParseError(f"cannot write {path}: {e}") from e
    with f:
        writer = csv.writer(f)
        writer.writerow(["series_id", "origin_index", "horizon", "forecast"])
        for matrix in sorted(items, key=lambda mx: mx.series_id):
            rows = matrix.require_rows()
            for k in range(1, matrix.n_origins + 1):
                for j in range(1, matrix.horizon + 1):
                    writer.writerow([matrix.series_id, k, j, repr(float(rows[k - 1, j - 1]))])


@dataclass(frozen=True)
class ResultRow:
    """One aggregated cell of the results table."""

    model: str
    variant: str  # "base", "PI" or "FI"
    weight: float | None
    metric: str
    value: float | None


def format_value(value: float) -> str:
    return f"{value:#.6g}"


def format_weight(weight: float) -> str:
    return f"{weight:g}"


def write_results_csv(rows, path) -> None:
    """Emit the aggregated results table, 6 significant digits per value."""
    ordered = sorted(
        rows, key=lambda r: (r.model, r.variant, r.metric, r.weight if r.weight is not None else -1.0)
    )
    try:
        f = open(path, "w", newline="")
    except OSError as e:
        raise ParseError(f"cannot write {path}: {e}") from e
    with f:
        writer = csv.writer(f)
        writer.writerow(["model", "variant", "w_s", "metric", "value"])
        for r in ordered:
            writer.writerow(
                [
                    r.model,
                    r.variant,
                    format_weight(r.weight) if r.weight is not None else "",
                    r.metric,
                    format_value(r.value) if r.value is not None else "",
                ]
            )


def read_results_csv(path) -> list[ResultRow]:
    try:
        f = open(path, newline="")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != [
            "model",
            "variant",
            "w_s",
            "metric",
            "value",
        ]:
            raise FormatError(f"{path}: expected header 'model,variant,w_s,metric,value'")
        out = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != 5:
                raise FormatError(f"{path}:{lineno}: expected 5 columns")
            model, variant, weight, metric, value = (c.strip() for c in record)
            try:
                out.append(
                    ResultRow(
                        model=model,
                        variant=variant,
                        weight=float(weight) if weight else None,
                        metric=metric,
                        value=float(value) if value else None,
                    )
                )
            except ValueError as e:
                raise FormatError(f"{path}:{lineno}: bad cell: {e}") from e
        return out


def write_raw_values_csv(raw, path) -> None:
    """Per-(series, origin) metric values, one block per variant."""
    try:
        f = open(path, "w", newline="")
    except OSError as e:
        raise ParseError(f"cannot write {path}: {e}") from e
    with f:
        writer = csv.writer(f)
        writer.writerow(["variant", "series_id", "origin_index", "metric", "value", "reason"])
        for variant in raw:
            for r in raw[variant]:
                writer.writerow(
                    [
                        variant,
                        r.series_id,
                        r.origin_index,
                        r.metric,
                        repr(float(r.value)) if r.value is not None else "",
                        r.reason or "",
                    ]
                )


def read_raw_values_csv(path):
    """Inverse of :func:`write_raw_values_csv`; returns variant -> reports."""
    from .metrics import MetricReport

    try:
        f = open(path, newline="")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    out: dict[str, list[MetricReport]] = {}
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        expected = ["variant", "series_id", "origin_index", "metric", "value", "reason"]
        if header is None or [h.strip().lower() for h in header] != expected:
            raise FormatError(f"{path}: expected header {','.join(expected)}")
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != 6:
                raise FormatError(f"{path}:{lineno}: expected 6 columns")
            variant, sid, origin, metric, value, reason = record
            try:
                out.setdefault(variant, []).append(
                    MetricReport(
                        series_id=sid,
                        origin_index=int(origin),
                        metric=metric,
                        value=float(value) if value.strip() else None,
                        reason=reason or None,
                    )
                )
            except ValueError as e:
                raise FormatError(f"{path}:{lineno}: bad cell: {e}") from e
    return out


def read_points_csv(path) -> list[tuple[str, float, float]]:
    """Read (label, accuracy, stability) trade-off points."""
    try:
        f = open(path, newline="")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != [
            "label",
            "accuracy",
            "stability",
        ]:
            raise FormatError(f"{path}: expected header 'label,accuracy,stability'")
        out = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not c.strip() for c in record):
                continue
            if len(record) != 3:
                raise FormatError(f"{path}:{lineno}: expected 3 columns")
            try:
                out.append((record[0].strip(), float(record[1]), float(record[2])))
            except ValueError as e:
                raise FormatError(f"{path}:{lineno}: bad cell: {e}") from e
        return out
