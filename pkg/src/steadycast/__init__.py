"""Post-processing stabilization of rolling-origin forecasts.

Smooth forecast revisions across origins (vertical) or across the horizon
of one origin (horizontal) by linear interpolation, score the result with
scaled accuracy and stability measures, and pick an operating point from
the accuracy-stability Pareto front.
"""

from .core import (
    Dataset,
    DataError,
    ForecastMatrix,
    FormatError,
    InsufficientHistoryError,
    ParseError,
    ShapeError,
    StabilizationSpec,
    TimeSeries,
    clamp_nonnegative,
    first_covering_origin,
    first_origin_time_for,
    target_time,
    validate,
)
from .dataio import (
    ResultRow,
    RunConfig,
    read_forecast_csv,
    read_long_csv,
    read_results_csv,
    write_forecast_csv,
    write_results_csv,
)
from .decompose import Decomposition, decompose, forecast_components, recompose
from .evaluate import (
    SweepResult,
    WilcoxonResult,
    bonferroni,
    per_series_average,
    run_sweep,
    significance_report,
    wilcoxon_signed_rank,
)
from .forecasters import (
    PooledLagModel,
    fit_pooled,
    holt_linear,
    lag_heuristic,
    predict_iterated,
    rolling_origin_forecasts,
    seasonal_naive,
)
from .metrics import (
    MetricReport,
    accuracy,
    aggregate,
    horizontal_change,
    vertical_change,
    vertical_change_initial,
)
from .pareto import (
    ParetoFront,
    TradeoffPoint,
    analyze_tradeoff,
    convex_smooth,
    pareto_front,
    select_by_curvature,
    select_with_budget,
    tradeoff_stats,
)
from .stabilize import (
    stabilize,
    stabilize_horizontal,
    stabilize_horizontal_on_remainder,
    stabilize_joint,
    stabilize_vertical,
)
from .synth import synthetic_dataset

__version__ = "0.1.0"
