"""Accuracy-stability trade-off analysis.

Both axes are minimized.  The non-dominated front is smoothed with its
lower-left convex hull (optionally a convexity-constrained quadratic
spline), an operating point is picked at the knot of highest discrete
curvature, and an accuracy budget can veto that pick in favour of the most
stable point still within budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CURVATURE_EPS = 1e-12


@dataclass(frozen=True)
class TradeoffPoint:
    label: str
    accuracy: float
    stability: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.accuracy) and math.isfinite(self.stability)):
            raise ValueError(f"point {self.label!r} has non-finite coordinates")
        if self.accuracy < 0 or self.stability < 0:
            raise ValueError(f"point {self.label!r} has negative coordinates")


def pareto_front(points) -> list[TradeoffPoint]:
    """All points not dominated by any other, sorted by increasing accuracy.

    A point is dominated when another is no worse on both axes and
    strictly better on at least one.  Coordinate duplicates are collapsed,
    keeping the first label.
    """
    pts = list(points)
    if not pts:
        raise ValueError("need at least one point")
    unique: list[TradeoffPoint] = []
    seen: set[tuple[float, float]] = set()
    for p in pts:
        key = (p.accuracy, p.stability)
        if key not in seen:
            seen.add(key)
            unique.append(p)
    front = [
        p
        for p in unique
        if not any(
            q.accuracy <= p.accuracy
            and q.stability <= p.stability
            and (q.accuracy < p.accuracy or q.stability < p.stability)
            for q in unique
        )
    ]
    return sorted(front, key=lambda p: p.accuracy)


def _cross(o: tuple[float, float], a: tuple[float, float], b: tuple[float, float]) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(front) -> list[TradeoffPoint]:
    """Lower-left convex hull of a front sorted by accuracy.

    Collinear points are kept, so slopes between consecutive knots are
    non-decreasing but not necessarily strictly.
    """
    hull: list[TradeoffPoint] = []
    for p in front:
        while (
            len(hull) >= 2
            and _cross(
                (hull[-2].accuracy, hull[-2].stability),
                (hull[-1].accuracy, hull[-1].stability),
                (p.accuracy, p.stability),
            )
            < 0.0
        ):
            hull.pop()
        hull.append(p)
    return hull


@dataclass(frozen=True)
class SmoothedCurve:
    mode: str  # "hull" or "spline"
    knots: tuple[TradeoffPoint, ...]
    sample_accuracy: np.ndarray
    sample_stability: np.ndarray


def convex_smooth(front, mode: str = "hull", n_samples: int = 201) -> SmoothedCurve:
    """Smooth the front into a convex, monotone-decreasing curve.

    The default is the piecewise-linear lower hull.  ``spline`` fits a
    quadratic spline with knots at the hull points under a nonnegative
    second-derivative constraint (nonnegative least squares on a
    truncated-power basis).
    """
    front = list(front)
    if len(front) < 2:
        if not front:
            raise ValueError("need at least one front point")
        p = front[0]
        return SmoothedCurve(
            mode=mode,
            knots=(p,),
            sample_accuracy=np.array([p.accuracy]),
            sample_stability=np.array([p.stability]),
        )
    knots = lower_hull(front)
    kx = np.array([p.accuracy for p in knots])
    ky = np.array([p.stability for p in knots])
    xs = np.linspace(kx[0], kx[-1], n_samples)
    if mode == "hull":
        ys = np.interp(xs, kx, ky)
    elif mode == "spline":
        ys = _convex_quadratic_spline(front, kx, xs)
    else:
        raise ValueError(f"unknown smoothing mode {mode!r}")
    return SmoothedCurve(mode=mode, knots=tuple(knots), sample_accuracy=xs, sample_stability=ys)


def _convex_quadratic_spline(front, knot_x: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Least-squares quadratic spline with f'' >= 0, knots at the hull."""
    from scipy.optimize import nnls

    fx = np.array([p.accuracy for p in front])
    fy = np.array([p.stability for p in front])
    span = knot_x[-1] - knot_x[0]
    if span == 0:
        return np.full(xs.shape, fy.mean())
    u = (fx - knot_x[0]) / span
    uk = (knot_x - knot_x[0]) / span

    def basis(t: np.ndarray) -> np.ndarray:
        cols = [np.ones_like(t), -np.ones_like(t), t, -t, t**2]
        for k in uk[1:-1]:
            cols.append(np.clip(t - k, 0.0, None) ** 2)
        return np.column_stack(cols)

    coef, _ = nnls(basis(u), fy)
    t = (xs - knot_x[0]) / span
    return basis(t) @ coef


@dataclass(frozen=True)
class Selection:
    point: TradeoffPoint
    mode: str  # "curvature", "budget" or "most_accurate_degenerate"
    curvature: float | None = None


def _normalized(hull) -> list[tuple[float, float]] | None:
    ax = [p.accuracy for p in hull]
    st = [p.stability for p in hull]
    dx = max(ax) - min(ax)
    dy = max(st) - min(st)
    if dx == 0 or dy == 0:
        return None
    return [((p.accuracy - min(ax)) / dx, (p.stability - min(st)) / dy) for p in hull]


def select_by_curvature(front) -> Selection:
    """Front point at the hull knot of highest discrete curvature.

    Curvature at an interior knot is the Menger curvature of it and its
    two hull neighbours (twice the sine of the turn angle over the chord
    length) after min-max normalizing both axes, so the choice is
    invariant under independent positive affine rescaling of either axis.
    Ties break toward the more accurate knot; degenerate fronts (fewer
    than three points, or collinear) fall back to the most accurate point.
    """
    front = list(front)
    if not front:
        raise ValueError("need at least one front point")
    if len(front) < 3:
        return Selection(front[0], "most_accurate_degenerate")
    hull = lower_hull(front)
    coords = _normalized(hull)
    if len(hull) < 3 or coords is None:
        return Selection(front[0], "most_accurate_degenerate")
    best_idx, best_curv = None, 0.0
    for i in range(1, len(hull) - 1):
        a, b, c = coords[i - 1], coords[i], coords[i + 1]
        cross = abs(_cross(a, b, c))
        sides = (
            math.dist(a, b) * math.dist(b, c) * math.dist(a, c)
        )
        curv = 2.0 * cross / sides if sides > 0 else 0.0
        if curv > best_curv:
            best_idx, best_curv = i, curv
    if best_idx is None or best_curv <= CURVATURE_EPS:
        return Selection(front[0], "most_accurate_degenerate")
    return Selection(hull[best_idx], "curvature", best_curv)


def accuracy_loss_pct(point: TradeoffPoint, best: TradeoffPoint) -> float:
    if best.accuracy == 0.0:
        return 0.0 if point.accuracy == 0.0 else math.inf
    return 100.0 * (point.accuracy - best.accuracy) / best.accuracy


def select_with_budget(front, delta_max_pct: float) -> Selection:
    """Curvature pick if its accuracy loss fits the budget, else the most
    stable front point whose loss does.

    The most accurate point always has zero loss, so a nonnegative budget
    is always feasible.
    """
    if delta_max_pct < 0:
        raise ValueError("accuracy budget must be >= 0")
    front = list(front)
    best = front[0]
    pick = select_by_curvature(front)
    if accuracy_loss_pct(pick.point, best) <= delta_max_pct:
        return pick
    within = [p for p in front if accuracy_loss_pct(p, best) <= delta_max_pct]
    return Selection(max(within, key=lambda p: p.accuracy), "budget")


@dataclass(frozen=True)
class TradeoffStats:
    accuracy_decrease_pct: float | None
    stability_increase_pct: float | None
    accuracy_decrease_abs: float
    stability_increase_abs: float


def tradeoff_stats(front, chosen: TradeoffPoint) -> TradeoffStats:
    """Accuracy given up and stability gained versus the most accurate
    front point, as percentages and absolute deltas."""
    front = list(front)
    if chosen not in front:
        raise ValueError(f"chosen point {chosen.label!r} is not on the front")
    best = front[0]
    if best.accuracy == 0.0:
        dec = 0.0 if chosen.accuracy == 0.0 else None
    else:
        dec = 100.0 * (chosen.accuracy - best.accuracy) / best.accuracy
    if best.stability == 0.0:
        inc = None
    else:
        inc = 100.0 * (best.stability - chosen.stability) / best.stability
    return TradeoffStats(
        accuracy_decrease_pct=dec,
        stability_increase_pct=inc,
        accuracy_decrease_abs=chosen.accuracy - best.accuracy,
        stability_increase_abs=best.stability - chosen.stability,
    )


@dataclass(frozen=True)
class ParetoFront:
    """Everything the trade-off analysis produced for one point set."""

    points: tuple[TradeoffPoint, ...]
    front: tuple[TradeoffPoint, ...]
    curve: SmoothedCurve
    selected: Selection
    stats: TradeoffStats


def analyze_tradeoff(
    points, delta_max_pct: float | None = None, curve_mode: str = "hull"
) -> ParetoFront:
    pts = list(points)
    front = pareto_front(pts)
    curve = convex_smooth(front, mode=curve_mode)
    if delta_max_pct is None or math.isinf(delta_max_pct):
        selected = select_by_curvature(front)
    else:
        selected = select_with_budget(front, delta_max_pct)
    return ParetoFront(
        points=tuple(pts),
        front=tuple(front),
        curve=curve,
        selected=selected,
        stats=tradeoff_stats(front, selected.point),
    )


def write_front_csv(result: ParetoFront, path) -> None:
    import csv

    front_labels = {p.label for p in result.front}
    knot_labels = {p.label for p in result.curve.knots}
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["label", "accuracy", "stability", "on_front", "on_hull", "selected"])
        for p in sorted(result.points, key=lambda q: (q.accuracy, q.stability, q.label)):
            writer.writerow(
                [
                    p.label,
                    repr(p.accuracy),
                    repr(p.stability),
                    int(p.label in front_labels),
                    int(p.label in knot_labels),
                    int(p.label == result.selected.point.label),
                ]
            )


def render_front_svg(
    result: ParetoFront,
    path,
    accuracy_label: str = "accuracy",
    stability_label: str = "stability",
    title: str = "",
) -> None:
    """Scatter of all variants with the front, smoothed curve and pick."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "steadycast"
    fig, ax = plt.subplots(figsize=(7, 5))
    xs = [p.accuracy for p in result.points]
    ys = [p.stability for p in result.points]
    ax.scatter(xs, ys, color="0.7", s=25, zorder=2, label="dominated")
    fx = [p.accuracy for p in result.front]
    fy = [p.stability for p in result.front]
    ax.scatter(fx, fy, color="tab:blue", s=40, zorder=3, label="front")
    ax.plot(
        result.curve.sample_accuracy,
        result.curve.sample_stability,
        color="tab:blue",
        lw=1.5,
        zorder=1,
        label=f"{result.curve.mode} curve",
    )
    sel = result.selected.point
    ax.scatter([sel.accuracy], [sel.stability], marker="*", s=220, color="tab:red", zorder=4,
               label=f"selected: {sel.label}")
    for p in result.points:
        ax.annotate(p.label, (p.accuracy, p.stability), fontsize=7,
                    textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel(accuracy_label)
    ax.set_ylabel(stability_label)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
