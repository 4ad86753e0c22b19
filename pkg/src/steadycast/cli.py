"""Command-line front-end.

Subcommands: forecast, stabilize, evaluate, sweep, pareto, wilcoxon.
Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
All run options can come from a ``key = value`` config file (``--config``)
and be overridden by the flag of the same name.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import evaluate as ev
from . import pareto as pf
from .core import DIRECTIONS, DataError, clamp_nonnegative
from .dataio import (
    RunConfig,
    build_config,
    read_config,
    read_forecast_csv,
    read_long_csv,
    read_points_csv,
    read_raw_values_csv,
    read_results_csv,
    write_forecast_csv,
    write_raw_values_csv,
    write_results_csv,
)
from .forecasters import rolling_origin_forecasts
from .metrics import (
    accuracy_reports,
    aggregate,
    horizontal_stability_reports,
    vertical_stability_reports,
)
from .stabilize import stabilize_joint, stabilize_rows_horizontal, stabilize_vertical
from .synth import parse_synth_spec, synthetic_dataset

USAGE_ERROR, DATA_ERROR, INTERNAL_ERROR = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we reserve 2 for data errors
        raise UsageError(message)


def _add_config_flags(p: _Parser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--data", help="dataset CSV path, or synth:<n>x<length>")
    p.add_argument("--m", type=int, help="seasonal period")
    p.add_argument("--horizon", type=int, help="forecast horizon")
    p.add_argument("--origins", type=int, help="number of rolling origins")
    p.add_argument("--model", help="snaive | holt | pooled | external:<path>")
    p.add_argument("--grid", help="comma-separated interpolation weights")
    p.add_argument("--direction", choices=DIRECTIONS)
    p.add_argument("--methods", help="comma subset of partial,full")
    p.add_argument("--out-dir", dest="out_dir", help="output directory")
    p.add_argument("--delta-max", dest="delta_max", type=float, help="accuracy budget, percent")
    p.add_argument("--alpha", type=float, help="initial significance level")
    p.add_argument("--comparisons", type=int, help="comparison count for the Bonferroni correction")
    p.add_argument("--jobs", type=int, help="worker processes for the sweep")
    p.add_argument("--seed", type=int, help="seed for the synthetic data generator")
    p.add_argument("--tune", action="store_const", const=True, default=None,
                   help="grid-search smoothing parameters of the trend model")
    p.add_argument("--clamp", action="store_const", const=True, default=None,
                   help="clamp stabilized forecasts at zero (post-step)")


def build_parser() -> _Parser:
    parser = _Parser(prog="steadycast", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("forecast", parents=[], help="rolling-origin forecasts to CSV")
    _add_config_flags(p)
    p.add_argument("--out", required=True, help="forecast CSV to write")

    p = sub.add_parser("stabilize", help="smooth a forecast CSV")
    _add_config_flags(p)
    p.add_argument("--forecasts", required=True, help="forecast CSV to read")
    p.add_argument("--method", choices=["partial", "full"], default="full")
    p.add_argument("--w", type=float, required=True, help="interpolation weight in [0, 1]")
    p.add_argument("--w2", type=float, help="second weight for joint directions")
    p.add_argument("--out", required=True, help="stabilized forecast CSV to write")

    p = sub.add_parser("evaluate", help="score a forecast CSV against a dataset")
    _add_config_flags(p)
    p.add_argument("--forecasts", required=True)
    p.add_argument("--out", required=True, help="aggregated results CSV")
    p.add_argument("--raw-out", dest="raw_out", help="per-(series, origin) values CSV")
    p.add_argument("--model-label", dest="model_label", default="model")
    p.add_argument("--variant", default="base")
    p.add_argument("--w", type=float, help="weight recorded in the output rows")

    p = sub.add_parser("sweep", help="full weight-grid experiment")
    _add_config_flags(p)

    p = sub.add_parser("pareto", help="front, smoothing, selection, SVG")
    _add_config_flags(p)
    p.add_argument("--results", help="results CSV from sweep/evaluate")
    p.add_argument("--points", help="bare label,accuracy,stability CSV")
    p.add_argument("--accuracy-metric", dest="accuracy_metric", default="MASE")
    p.add_argument("--stability-metric", dest="stability_metric", default="MASC_V")
    p.add_argument("--spline", action="store_true", help="spline smoothing instead of the hull")

    p = sub.add_parser("wilcoxon", help="significance of one variant against another")
    _add_config_flags(p)
    p.add_argument("--raw", required=True, help="raw values CSV from sweep")
    p.add_argument("--baseline", default="base")
    p.add_argument("--candidate", required=True)
    p.add_argument("--metric", action="append", help="metric name (repeatable; default: all)")
    p.add_argument("--out", help="write the report here instead of stdout")

    return parser


def load_run_config(args) -> RunConfig:
    file_values = read_config(args.config) if getattr(args, "config", None) else {}
    overrides = {}
    for key in ("data", "m", "horizon", "origins", "model", "direction", "out_dir",
                "delta_max", "alpha", "comparisons", "jobs", "seed", "tune", "clamp"):
        overrides[key] = getattr(args, key, None)
    if getattr(args, "grid", None) is not None:
        overrides["grid"] = tuple(float(x) for x in args.grid.split(","))
    if getattr(args, "methods", None) is not None:
        overrides["methods"] = tuple(x.strip() for x in args.methods.split(","))
    return build_config(file_values, overrides)


def load_dataset(config: RunConfig):
    if not config.data:
        raise UsageError("--data is required")
    if config.data.startswith("synth:"):
        n, length = parse_synth_spec(config.data)
        return synthetic_dataset(n, length, config.m, seed=config.seed)
    return read_long_csv(config.data, config.m)


def _cmd_forecast(args) -> int:
    config = load_run_config(args)
    dataset = load_dataset(config)
    matrices, skipped = rolling_origin_forecasts(
        dataset, config.model, config.horizon, config.origins, tune=config.tune
    )
    write_forecast_csv(matrices, args.out)
    print(f"wrote {len(matrices)} forecast grids to {args.out}"
          + (f" ({len(skipped)} series skipped)" if skipped else ""))
    return 0


def _cmd_stabilize(args) -> int:
    config = load_run_config(args)
    if not 0.0 <= args.w <= 1.0:
        raise UsageError(f"--w {args.w} outside [0, 1]")
    if args.w2 is not None and not 0.0 <= args.w2 <= 1.0:
        raise UsageError(f"--w2 {args.w2} outside [0, 1]")
    matrices = read_forecast_csv(args.forecasts)
    out = {}
    for sid, mx in matrices.items():
        if config.direction == "vertical":
            sm = stabilize_vertical(mx, args.w, args.method)
        elif config.direction == "horizontal":
            sm = stabilize_rows_horizontal(mx, args.w, args.method)
        else:
            w2 = args.w2 if args.w2 is not None else args.w
            sm = stabilize_joint(mx, args.w, w2, config.direction, args.method)
        out[sid] = clamp_nonnegative(sm) if config.clamp else sm
    write_forecast_csv(out, args.out)
    print(f"stabilized {len(out)} grids ({config.direction}, {args.method}, w={args.w}) "
          f"-> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    from .dataio import ResultRow

    config = load_run_config(args)
    dataset = load_dataset(config)
    matrices, skipped = ev.anchor_forecasts(read_forecast_csv(args.forecasts), dataset)
    reports = []
    for s in dataset:
        if s.id not in matrices:
            continue
        mx = matrices[s.id]
        m = dataset.seasonal_period
        reports.extend(accuracy_reports(mx, s.values, m))
        reports.extend(vertical_stability_reports(mx, s.values, m))
        rows = mx.require_rows()
        for k in range(1, mx.n_origins + 1):
            training = s.values[: mx.origin_time(k)]
            reports.extend(horizontal_stability_reports(s.id, k, rows[k - 1], training, m))
    stats = aggregate(reports)
    result_rows = [
        ResultRow(args.model_label, args.variant, args.w, metric, stat.mean)
        for metric, stat in stats.items()
    ]
    write_results_csv(result_rows, args.out)
    if args.raw_out:
        write_raw_values_csv({args.variant if args.w is None else f"{args.variant}_{args.w:g}": reports},
                             args.raw_out)
    print(f"evaluated {len(matrices)} grids -> {args.out}"
          + (f" ({len(skipped)} series skipped)" if skipped else ""))
    return 0


def _cmd_sweep(args) -> int:
    config = load_run_config(args)
    dataset = load_dataset(config)
    forecasts = None
    if config.model.startswith("external:"):
        forecasts = read_forecast_csv(config.model.split(":", 1)[1])
    result = ev.run_sweep(dataset, config, forecasts=forecasts)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results_csv(result.result_rows(), out_dir / "results.csv")
    write_raw_values_csv(result.raw, out_dir / "raw_values.csv")
    accuracy_metric = "MASE"
    best = ev.most_accurate_variant(result, accuracy_metric)
    if best is not None:
        records = ev.significance_report(
            result, "base", [best], config.alpha, config.comparisons
        )
        text = ev.render_significance_text(records, "base", config.alpha, config.comparisons)
        (out_dir / "significance.txt").write_text(text)
    print(f"swept {len(result.variants)} variants ({config.direction}, model {config.model}) "
          f"-> {out_dir}/results.csv"
          + (f" ({len(result.skipped)} series skipped)" if result.skipped else ""))
    return 0


def _variant_points(rows, accuracy_metric: str, stability_metric: str):
    acc, stab = {}, {}
    for r in rows:
        label = r.variant if r.weight is None else f"{r.variant}_{r.weight:g}"
        if r.value is None:
            continue
        if r.metric == accuracy_metric:
            acc[label] = r.value
        elif r.metric == stability_metric:
            stab[label] = r.value
    labels = [lab for lab in acc if lab in stab]
    if not labels:
        raise DataError(
            f"no variants carry both {accuracy_metric!r} and {stability_metric!r}"
        )
    return [pf.TradeoffPoint(lab, acc[lab], stab[lab]) for lab in labels]


def _cmd_pareto(args) -> int:
    config = load_run_config(args)
    if bool(args.results) == bool(args.points):
        raise UsageError("provide exactly one of --results or --points")
    if args.points:
        points = [pf.TradeoffPoint(*row) for row in read_points_csv(args.points)]
    else:
        points = _variant_points(
            read_results_csv(args.results), args.accuracy_metric, args.stability_metric
        )
    result = pf.analyze_tradeoff(
        points,
        delta_max_pct=config.delta_max,
        curve_mode="spline" if args.spline else "hull",
    )
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pf.write_front_csv(result, out_dir / "front.csv")
    pf.render_front_svg(
        result,
        out_dir / "front.svg",
        accuracy_label=args.accuracy_metric,
        stability_label=args.stability_metric,
    )
    sel, st = result.selected, result.stats
    dec = "n/a" if st.accuracy_decrease_pct is None else f"{st.accuracy_decrease_pct:.3f}%"
    inc = "n/a" if st.stability_increase_pct is None else f"{st.stability_increase_pct:.3f}%"
    print(f"front: {len(result.front)}/{len(result.points)} points; "
          f"selected {sel.point.label} ({sel.mode}); "
          f"accuracy decrease {dec}, stability increase {inc}; "
          f"wrote {out_dir}/front.csv and {out_dir}/front.svg")
    return 0


def _cmd_wilcoxon(args) -> int:
    config = load_run_config(args)
    raw = read_raw_values_csv(args.raw)
    for name in (args.baseline, args.candidate):
        if name not in raw:
            raise DataError(f"variant {name!r} not present in {args.raw}")
    metrics = args.metric or sorted({r.metric for r in raw[args.candidate]})
    records = []
    for metric in metrics:
        base_avg = ev.per_series_average(raw[args.baseline], metric)
        cand_avg = ev.per_series_average(raw[args.candidate], metric)
        common = sorted(set(base_avg) & set(cand_avg))
        if not common:
            records.append(ev.SignificanceRecord(args.candidate, metric, 0, None, False))
            continue
        res = ev.wilcoxon_signed_rank(
            [cand_avg[sid] for sid in common], [base_avg[sid] for sid in common]
        )
        records.append(
            ev.SignificanceRecord(
                args.candidate, metric, len(common), res.p_value,
                res.p_value < ev.bonferroni(config.alpha, config.comparisons),
            )
        )
    text = ev.render_significance_text(records, args.baseline, config.alpha, config.comparisons)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return 0


_COMMANDS = {
    "forecast": _cmd_forecast,
    "stabilize": _cmd_stabilize,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "pareto": _cmd_pareto,
    "wilcoxon": _cmd_wilcoxon,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return USAGE_ERROR
        return _COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    except (DataError, OSError, ValueError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return DATA_ERROR
    except SystemExit:
        raise
    except Exception as e:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
