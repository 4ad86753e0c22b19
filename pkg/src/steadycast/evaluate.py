"""Experiment orchestration: grid sweeps, aggregation, significance tests.

A sweep computes the base metrics plus, for every interpolation weight in
the grid and every method, the smoothed forecasts and their full metric
suite.  The vertical direction smooths the forecast grid directly; the
horizontal direction decomposes each training window, forecasts and
smooths only the remainder, and recomposes; accuracy is then scored on
the recomposed forecasts while stability is scored on the smoothed
remainders, scaled by the in-sample remainder.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    FULL,
    HORIZONTAL,
    PARTIAL,
    VERTICAL,
    Dataset,
    ForecastMatrix,
    TimeSeries,
    first_origin_time_for,
)
from .dataio import ResultRow, RunConfig, format_weight
from .decompose import decompose, forecast_components
from .forecasters import (
    fit_pooled,
    lag_heuristic,
    make_local_forecaster,
    min_history,
    predict_iterated,
    rolling_origin_forecasts,
)
from .metrics import (
    AggregateStat,
    MetricReport,
    accuracy,
    accuracy_reports,
    aggregate,
    horizontal_stability_reports,
    vertical_stability_reports,
)
from .stabilize import (
    stabilize_horizontal,
    stabilize_joint,
    stabilize_rows_horizontal,
    stabilize_vertical,
)

logger = logging.getLogger(__name__)

EXACT_WILCOXON_LIMIT = 20


def variant_label(method: str, weight: float) -> str:
    return ("PI" if method == PARTIAL else "FI") + "_" + format_weight(weight)


def split_variant_label(label: str) -> tuple[str, float | None]:
    """Inverse of :func:`variant_label`; base has no weight."""
    if label == "base":
        return "base", None
    prefix, _, weight = label.partition("_")
    if prefix not in ("PI", "FI") or not weight:
        raise ValueError(f"unrecognized variant label {label!r}")
    return prefix, float(weight)


@dataclass(frozen=True)
class SweepResult:
    model: str
    direction: str
    variants: tuple[str, ...]
    table: dict[str, dict[str, AggregateStat]]
    raw: dict[str, list[MetricReport]]
    skipped: tuple[tuple[str, str], ...]

    def result_rows(self) -> list[ResultRow]:
        rows = []
        for variant in self.variants:
            method, weight = split_variant_label(variant)
            for metric, stat in self.table[variant].items():
                rows.append(ResultRow(self.model, method, weight, metric, stat.mean))
        return rows


def _vertical_reports(matrix: ForecastMatrix, values: np.ndarray, m: int) -> list[MetricReport]:
    return accuracy_reports(matrix, values, m) + vertical_stability_reports(matrix, values, m)


def _row_horizontal_reports(matrix: ForecastMatrix, values: np.ndarray, m: int) -> list[MetricReport]:
    reports = []
    rows = matrix.require_rows()
    for k in range(1, matrix.n_origins + 1):
        training = values[: matrix.origin_time(k)]
        reports.extend(
            horizontal_stability_reports(matrix.series_id, k, rows[k - 1], training, m)
        )
    return reports


def _grid_series_job(args):
    """Per-series work for the vertical / joint / flat-horizontal sweeps."""
    matrix, values, m, grid, methods, direction = args
    out: dict[str, list[MetricReport]] = {}

    def score(mx: ForecastMatrix) -> list[MetricReport]:
        if direction == VERTICAL:
            return _vertical_reports(mx, values, m)
        if direction == HORIZONTAL:
            return accuracy_reports(mx, values, m) + _row_horizontal_reports(mx, values, m)
        return _vertical_reports(mx, values, m) + _row_horizontal_reports(mx, values, m)

    def transform(weight: float, method: str) -> ForecastMatrix:
        if direction == VERTICAL:
            return stabilize_vertical(matrix, weight, method)
        if direction == HORIZONTAL:
            return stabilize_rows_horizontal(matrix, weight, method)
        return stabilize_joint(matrix, weight, weight, direction, method)

    out["base"] = score(matrix)
    for method in methods:
        for weight in grid:
            out[variant_label(method, weight)] = score(transform(weight, method))
    return matrix.series_id, out


def _remainder_series_job(args):
    """Per-series work for the horizontal remainder sweep.

    ``origin_data`` carries, per origin: (origin_index, origin_time,
    un-smoothed remainder forecast, in-sample remainder, component
    forecast).  Only the smoothing and scoring happen here.
    """
    series_id, values, m, grid, methods, horizon, origin_data = args
    out: dict[str, list[MetricReport]] = {}

    def score(weight: float, method: str) -> list[MetricReport]:
        reports: list[MetricReport] = []
        for k, t, remainder_fc, remainder, components in origin_data:
            smoothed = stabilize_horizontal(remainder_fc, weight, method)
            recomposed = smoothed + components
            actuals = values[t : t + horizon]
            training = values[:t]
            for kind in ("MASE", "RMSSE", "sMAPE"):
                v = accuracy(kind, actuals, recomposed, training, m)
                reports.append(
                    MetricReport(
                        series_id, k, kind, v, None if v is not None else "zero scaling denominator"
                    )
                )
            reports.extend(
                horizontal_stability_reports(series_id, k, smoothed, remainder, m)
            )
        return reports

    out["base"] = score(0.0, FULL)
    for method in methods:
        for weight in grid:
            out[variant_label(method, weight)] = score(weight, method)
    return series_id, out


def _run_jobs(job, args_list, jobs: int):
    if jobs <= 1 or len(args_list) <= 1:
        return [job(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(job, args_list, chunksize=max(1, len(args_list) // (4 * jobs))))


def _prepare_remainder_data(dataset: Dataset, config: RunConfig):
    """Decompose every training window and forecast its remainder.

    Returns (per-series origin data, skipped) with deterministic ordering.
    The pooled model is refitted per origin on the pooled remainders.
    """
    m = dataset.seasonal_period
    h, n_origins = config.horizon, config.origins
    needed = max(2 * m + 1, min_history(config.model, m))
    skipped: list[tuple[str, str]] = []
    usable: list[TimeSeries] = []
    for s in dataset:
        t_first = first_origin_time_for(len(s), h, n_origins)
        if t_first < needed:
            skipped.append((s.id, f"needs {needed} observations at origin 1, has {t_first}"))
        else:
            usable.append(s)
    for sid, reason in skipped:
        logger.warning("skipping series %s: %s", sid, reason)

    origin_data: dict[str, list[tuple]] = {s.id: [] for s in usable}
    local_fn = None
    if config.model != "pooled":
        local_fn = make_local_forecaster(config.model, m, tune=config.tune)
    for k in range(1, n_origins + 1):
        parts_by_id = {}
        for s in usable:
            t = first_origin_time_for(len(s), h, n_origins) + k - 1
            parts_by_id[s.id] = (t, decompose(s.values[:t], m))
        if config.model == "pooled":
            n_lags = lag_heuristic(m)
            model = fit_pooled([p.remainder for _, p in parts_by_id.values()], n_lags)
            forecast = lambda remainder: predict_iterated(model, remainder, h)
        else:
            forecast = lambda remainder: local_fn(remainder, h)
        for s in usable:
            t, parts = parts_by_id[s.id]
            origin_data[s.id].append(
                (k, t, forecast(parts.remainder), parts.remainder, forecast_components(parts, h))
            )
    return usable, origin_data, skipped


def run_sweep(
    dataset: Dataset,
    config: RunConfig,
    forecasts: dict[str, ForecastMatrix] | None = None,
) -> SweepResult:
    """Full grid sweep; see the module docstring for the two routes."""
    m = dataset.seasonal_period
    direction = config.direction
    grid = tuple(config.grid)
    methods = tuple(config.methods)
    variants = ["base"] + [variant_label(meth, w) for meth in methods for w in grid]

    if direction == HORIZONTAL and forecasts is None:
        usable, origin_data, skipped = _prepare_remainder_data(dataset, config)
        args_list = [
            (s.id, s.values, m, grid, methods, config.horizon, origin_data[s.id])
            for s in usable
        ]
        results = _run_jobs(_remainder_series_job, args_list, config.jobs)
    else:
        if forecasts is None:
            matrices, skipped = rolling_origin_forecasts(
                dataset, config.model, config.horizon, config.origins, tune=config.tune
            )
        else:
            matrices, skipped = anchor_forecasts(forecasts, dataset)
            if direction == HORIZONTAL:
                logger.warning(
                    "external forecasts: horizontal smoothing runs on the raw rows "
                    "(flat-line mode), not on decomposition remainders"
                )
        args_list = [
            (matrices[s.id], s.values, m, grid, methods, direction)
            for s in dataset
            if s.id in matrices
        ]
        results = _run_jobs(_grid_series_job, args_list, config.jobs)

    raw: dict[str, list[MetricReport]] = {v: [] for v in variants}
    for _, per_variant in results:  # already in dataset order
        for v in variants:
            raw[v].extend(per_variant[v])
    table = {v: aggregate(raw[v]) for v in variants}
    return SweepResult(
        model=config.model,
        direction=direction,
        variants=tuple(variants),
        table=table,
        raw=raw,
        skipped=tuple(skipped),
    )


def anchor_forecasts(
    forecasts: dict[str, ForecastMatrix], dataset: Dataset
) -> tuple[dict[str, ForecastMatrix], list[tuple[str, str]]]:
    """Attach external grids to series via the placement rule."""
    matrices: dict[str, ForecastMatrix] = {}
    skipped: list[tuple[str, str]] = []
    ids = {s.id for s in dataset}
    for sid in forecasts:
        if sid not in ids:
            skipped.append((sid, "no matching series in the dataset"))
            logger.warning("skipping forecasts for %s: no matching series", sid)
    for s in dataset:
        if s.id not in forecasts:
            skipped.append((s.id, "no forecasts supplied"))
            continue
        mx = forecasts[s.id]
        if mx.first_origin_time is None:
            mx = mx.anchored(first_origin_time_for(len(s), mx.horizon, mx.n_origins))
        matrices[s.id] = mx
    return matrices, skipped


def per_series_average(reports, metric: str) -> dict[str, float]:
    """Mean over origins per series: the paired-sample unit for testing,
    since forecasts from different origins of one series are dependent."""
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    dropped = set()
    for r in reports:
        if r.metric != metric:
            continue
        if r.defined:
            sums[r.series_id] = sums.get(r.series_id, 0.0) + r.value
            counts[r.series_id] = counts.get(r.series_id, 0) + 1
        else:
            dropped.add(r.series_id)
    for sid in dropped - set(counts):
        logger.warning("series %s has no defined %s values; dropped", sid, metric)
    return {sid: sums[sid] / counts[sid] for sid in counts}


def _midranks(magnitudes: np.ndarray) -> np.ndarray:
    order = np.argsort(magnitudes, kind="stable")
    ranks = np.empty(magnitudes.shape[0])
    i = 0
    while i < order.shape[0]:
        j = i
        while j + 1 < order.shape[0] and magnitudes[order[j + 1]] == magnitudes[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # rank sum of positive differences
    n_effective: int
    p_value: float
    method: str  # "exact", "normal" or "degenerate"


def _signed_rank_counts(doubled_ranks: list[int]) -> np.ndarray:
    """Distribution of twice the positive-rank sum over all sign patterns.

    counts[k] is the number of the 2^n sign assignments whose doubled
    statistic equals k; computed by polynomial multiplication, which is
    exactly the enumeration collapsed term by term.
    """
    total = sum(doubled_ranks)
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    top = 0
    for r in doubled_ranks:
        counts[r : top + r + 1] += counts[: top + 1].copy()
        top += r
    return counts


def wilcoxon_signed_rank(
    a,
    b=None,
    alternative: str = "two-sided",
    exact_limit: int = EXACT_WILCOXON_LIMIT,
) -> WilcoxonResult:
    """Wilcoxon signed-rank test on paired samples (or differences).

    Zero differences are dropped.  With ``n`` effective pairs at most
    ``exact_limit``, the p-value comes from the exact distribution over
    all 2^n sign patterns (ties handled via midranks); beyond that, from
    a normal approximation with tie and continuity corrections.  All
    pairs tied yields the degenerate result p = 1.
    """
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    diffs = np.asarray(a, dtype=np.float64)
    if b is not None:
        other = np.asarray(b, dtype=np.float64)
        if diffs.shape != other.shape:
            raise ValueError("paired samples differ in length")
        diffs = diffs - other
    diffs = diffs[diffs != 0.0]
    n = diffs.shape[0]
    if n == 0:
        return WilcoxonResult(statistic=0.0, n_effective=0, p_value=1.0, method="degenerate")
    ranks = _midranks(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())

    if n <= exact_limit:
        doubled = [int(round(2.0 * r)) for r in ranks]
        counts = _signed_rank_counts(doubled)
        total = float(2**n)
        w2 = int(round(2.0 * w_plus))
        s2 = sum(doubled)

        def tail_ge(k: int) -> float:
            return float(counts[max(k, 0) :].sum()) / total

        def tail_le(k: int) -> float:
            return float(counts[: min(k, s2) + 1].sum()) / total if k >= 0 else 0.0

        if alternative == "greater":
            p = tail_ge(w2)
        elif alternative == "less":
            p = tail_le(w2)
        else:
            hi, lo = max(w2, s2 - w2), min(w2, s2 - w2)
            p = tail_ge(hi) + tail_le(lo)
        return WilcoxonResult(w_plus, n, min(1.0, p), "exact")

    mean = n * (n + 1) / 4.0
    tie_term = 0.0
    _, tie_counts = np.unique(np.abs(diffs), return_counts=True)
    for t in tie_counts:
        tie_term += (t**3 - t) / 48.0
    sd = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
    if alternative == "greater":
        z = (w_plus - mean - 0.5) / sd
        p = 0.5 * math.erfc(z / math.sqrt(2.0))
    elif alternative == "less":
        z = (w_plus - mean + 0.5) / sd
        p = 0.5 * math.erfc(-z / math.sqrt(2.0))
    else:
        delta = abs(w_plus - mean)
        z = max(0.0, delta - 0.5) / sd
        p = math.erfc(z / math.sqrt(2.0))
    return WilcoxonResult(w_plus, n, min(1.0, max(0.0, p)), "normal")


def bonferroni(alpha: float, comparisons: int) -> float:
    """Corrected significance level: alpha divided by the comparison count."""
    if comparisons < 1:
        raise ValueError("comparison count must be >= 1")
    return alpha / comparisons


@dataclass(frozen=True)
class SignificanceRecord:
    candidate: str
    metric: str
    n_series: int
    p_value: float | None
    significant: bool


def significance_report(
    sweep: SweepResult,
    baseline: str,
    candidates,
    alpha: float,
    comparisons: int,
    metrics=None,
) -> list[SignificanceRecord]:
    """Wilcoxon per metric on per-series origin-averages against a baseline.

    A candidate is flagged significant on a metric when the two-sided p
    falls below the Bonferroni-corrected level alpha / comparisons.
    """
    if baseline not in sweep.table:
        raise ValueError(f"unknown baseline variant {baseline!r}")
    threshold = bonferroni(alpha, comparisons)
    records: list[SignificanceRecord] = []
    for candidate in candidates:
        if candidate not in sweep.table:
            raise ValueError(f"unknown candidate variant {candidate!r}")
        metric_names = metrics or sorted(sweep.table[candidate])
        for metric in metric_names:
            base_avg = per_series_average(sweep.raw[baseline], metric)
            cand_avg = per_series_average(sweep.raw[candidate], metric)
            common = sorted(set(base_avg) & set(cand_avg))
            if not common:
                records.append(SignificanceRecord(candidate, metric, 0, None, False))
                continue
            res = wilcoxon_signed_rank(
                [cand_avg[sid] for sid in common],
                [base_avg[sid] for sid in common],
            )
            records.append(
                SignificanceRecord(
                    candidate, metric, len(common), res.p_value, res.p_value < threshold
                )
            )
    return records


def most_accurate_variant(sweep: SweepResult, metric: str = "MASE") -> str | None:
    """Non-base variant with the lowest aggregated accuracy value."""
    best, best_value = None, math.inf
    for variant in sweep.variants:
        if variant == "base":
            continue
        stat = sweep.table[variant].get(metric)
        if stat is not None and stat.mean is not None and stat.mean < best_value:
            best, best_value = variant, stat.mean
    return best


def render_significance_text(
    records, baseline: str, alpha: float, comparisons: int
) -> str:
    lines = [
        f"Wilcoxon signed-rank tests against baseline {baseline!r}",
        f"alpha = {alpha}, comparisons = {comparisons}, "
        f"corrected level = {bonferroni(alpha, comparisons):.9f}",
        "",
        f"{'candidate':<12} {'metric':<10} {'n':>5} {'p-value':>12}  significant",
    ]
    for r in records:
        p = "undefined" if r.p_value is None else f"{r.p_value:.3e}"
        mark = "*" if r.significant else ""
        lines.append(f"{r.candidate:<12} {r.metric:<10} {r.n_series:>5} {p:>12}  {mark}")
    return "\n".join(lines) + "\n"
