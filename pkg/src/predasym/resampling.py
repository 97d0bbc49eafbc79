"""Ensemble statistics for single empirical realizations.

Three layers compose here: random contiguous segments of a series, Monte
Carlo redraws of value/age uncertainty binned onto a uniform grid, and
percentile ribbons of the normalized asymmetry across the resulting
ensemble. Uncertainty is redrawn first and segments are picked second, so
every segment of one member sees a consistent age model.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .asymmetry import asymmetry_curve
from .estimators import te_spectrum
from .exceptions import (
    EmptyRange,
    InvalidParams,
    LengthMismatch,
    NumericalError,
    PredasymError,
    TooShort,
)
from .rng import derive_seed, make_rng
from .series import TimeSeries, UncertainSeries


@dataclass(frozen=True)
class SegmentSpec:
    count: int
    min_frac: float
    max_frac: float
    seed: int

    def __post_init__(self):
        if not isinstance(self.count, (int, np.integer)) or isinstance(self.count, bool) or self.count < 1:
            raise InvalidParams(f"count must be a positive integer, got {self.count!r}")
        for name in ("min_frac", "max_frac"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not 0.0 < v <= 1.0:
                raise InvalidParams(f"{name} must lie in (0, 1], got {v!r}")
        if self.min_frac > self.max_frac:
            raise InvalidParams(
                f"min_frac {self.min_frac} exceeds max_frac {self.max_frac}"
            )
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise InvalidParams(f"seed must be an integer, got {self.seed!r}")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "seed", int(self.seed))


def _segment_bounds(n, spec):
    lo = int(math.floor(spec.min_frac * n))
    hi = int(math.floor(spec.max_frac * n))
    if lo < 2:
        raise TooShort(
            f"shortest segment would have {lo} samples; need at least 2"
        )
    return lo, hi


def random_segments(ts, spec: SegmentSpec) -> list:
    """Contiguous random segments of `ts`, deterministic under spec.seed."""
    n = len(ts)
    lo, hi = _segment_bounds(n, spec)
    rng = make_rng(spec.seed)
    out = []
    for _ in range(spec.count):
        length = int(rng.integers(lo, hi + 1))
        start = int(rng.integers(0, n - length + 1))
        out.append(TimeSeries(ts.values[start:start + length], dt=ts.dt, label=ts.label))
    return out


@dataclass(frozen=True)
class ResampleReport:
    inversions: int
    interior_filled: int
    edges_dropped: int


def _draw_points(us: UncertainSeries, rng):
    ages = rng.normal(us.age_mean, us.age_sd)
    values = rng.normal(us.value_mean, us.value_sd)
    inversions = int(np.sum(np.diff(ages) < 0))
    order = np.argsort(ages, kind="stable")
    return ages[order], values[order], inversions


def _bin_means(ages, values, anchor, n_bins, width):
    idx = np.floor((ages - anchor) / width).astype(int)
    keep = (idx >= 0) & (idx < n_bins)
    sums = np.bincount(idx[keep], weights=values[keep], minlength=n_bins)
    counts = np.bincount(idx[keep], minlength=n_bins)
    out = np.full(n_bins, np.nan)
    hit = counts > 0
    out[hit] = sums[hit] / counts[hit]
    return out


def _fill_interior(binned):
    """Interpolate interior gaps; returns (array with NaN edges, lo, hi, n_filled)."""
    filled = np.asarray(binned, float).copy()
    good = np.flatnonzero(~np.isnan(filled))
    if good.size == 0:
        return filled, 0, -1, 0
    lo, hi = int(good[0]), int(good[-1])
    gaps = np.isnan(filled)
    gaps[:lo] = False
    gaps[hi + 1:] = False
    n_filled = int(gaps.sum())
    if n_filled:
        filled[gaps] = np.interp(np.flatnonzero(gaps), good, filled[good])
    return filled, lo, hi, n_filled


def resample_uncertain(us: UncertainSeries, bin_width, seed, return_report=False):
    """One Monte Carlo redraw of an uncertain series on a uniform age grid.

    Ages and values are drawn from per-observation normal distributions, the
    draws sorted by age (inversions are kept and counted), and values
    averaged inside fixed-width age bins anchored at a multiple of
    bin_width. Interior empty bins are linearly interpolated; empty edge
    bins are dropped. With return_report=True also returns a ResampleReport.
    """
    if not isinstance(bin_width, (int, float)) or isinstance(bin_width, bool) \
            or not math.isfinite(bin_width) or bin_width <= 0:
        raise InvalidParams(f"bin_width must be a positive real, got {bin_width!r}")
    rng = make_rng(seed)
    ages, values, inversions = _draw_points(us, rng)
    anchor = math.floor(float(ages.min()) / bin_width) * bin_width
    n_bins = int(math.floor((float(ages.max()) - anchor) / bin_width)) + 1
    filled, lo, hi, n_filled = _fill_interior(
        _bin_means(ages, values, anchor, n_bins, bin_width)
    )
    n_kept = hi - lo + 1
    if n_kept < 2:
        raise EmptyRange(
            f"binned age range covers {max(n_kept, 0)} bins; need at least 2"
        )
    ts = TimeSeries(filled[lo:hi + 1], dt=float(bin_width), label=us.label)
    if return_report:
        return ts, ResampleReport(
            inversions=inversions,
            interior_filled=n_filled,
            edges_dropped=lo + (n_bins - 1 - hi),
        )
    return ts


def _resample_pair(us_x, us_y, bin_width, seed):
    """Redraw both uncertain series onto one shared age grid."""
    rng = make_rng(seed)
    ax, vx, _ = _draw_points(us_x, rng)
    ay, vy, _ = _draw_points(us_y, rng)
    anchor = math.floor(min(float(ax.min()), float(ay.min())) / bin_width) * bin_width
    top = max(float(ax.max()), float(ay.max()))
    n_bins = int(math.floor((top - anchor) / bin_width)) + 1
    fx, lox, hix, _ = _fill_interior(_bin_means(ax, vx, anchor, n_bins, bin_width))
    fy, loy, hiy, _ = _fill_interior(_bin_means(ay, vy, anchor, n_bins, bin_width))
    lo = max(lox, loy)
    hi = min(hix, hiy)
    if hi - lo + 1 < 2:
        raise EmptyRange("the two series share fewer than 2 age bins")
    return fx[lo:hi + 1], fy[lo:hi + 1]


@dataclass(frozen=True)
class EnsembleCurve:
    etas: tuple
    median: tuple
    lower: tuple
    upper: tuple
    percentiles: tuple
    n_members: int
    n_failed: int

    def __post_init__(self):
        etas = tuple(int(e) for e in self.etas)
        med = tuple(float(v) for v in self.median)
        low = tuple(float(v) for v in self.lower)
        up = tuple(float(v) for v in self.upper)
        if not len(etas) == len(med) == len(low) == len(up):
            raise LengthMismatch("etas, median, lower, upper must have equal length")
        for lo_v, md, hi_v in zip(low, med, up):
            if math.isnan(lo_v) or math.isnan(md) or math.isnan(hi_v):
                continue
            if not lo_v <= md <= hi_v:
                raise InvalidParams(
                    f"percentile ordering violated: {lo_v} <= {md} <= {hi_v} fails"
                )
        object.__setattr__(self, "etas", etas)
        object.__setattr__(self, "median", med)
        object.__setattr__(self, "lower", low)
        object.__setattr__(self, "upper", up)
        object.__setattr__(self, "percentiles", tuple(float(p) for p in self.percentiles))


def _member_curves(xs, ys, eta_max, f, estimator, k, l, m, tau, nn_k1, nn_k2):
    common = dict(
        eta_max=eta_max, estimator=estimator, k=k, l=l, m=m, tau=tau,
        nn_k1=nn_k1, nn_k2=nn_k2,
    )
    curve_xy = asymmetry_curve(te_spectrum(xs, ys, **common), f=f)
    curve_yx = asymmetry_curve(te_spectrum(ys, xs, **common), f=f)
    return np.asarray(curve_xy.normalized, float), np.asarray(curve_yx.normalized, float)


def ensemble_asymmetry(
    x,
    y,
    segments: SegmentSpec,
    resamples=0,
    eta_max=10,
    f=1.0,
    estimator="vf",
    percentiles=(10.0, 90.0),
    bin_width=None,
    k=1,
    l=1,
    m=1,
    tau=1,
    nn_k1=2,
    nn_k2=3,
    n_jobs=1,
) -> dict:
    """Percentile ribbons of the normalized asymmetry over a member ensemble.

    Members are all (uncertainty redraw, segment) combinations: with plain
    TimeSeries inputs the redraw step is a no-op, with UncertainSeries
    inputs both series are redrawn onto a shared age grid (resamples >= 1
    and bin_width required). Each member slices one random segment from the
    pair and computes the normalized asymmetry for eta = 1..eta_max.
    Members that raise or produce non-finite curves are dropped and counted.
    Returns {"xy": EnsembleCurve, "yx": EnsembleCurve}.
    """
    p_lo, p_hi = (float(percentiles[0]), float(percentiles[1]))
    if not 0.0 <= p_lo < p_hi <= 100.0:
        raise InvalidParams(f"percentiles must satisfy 0 <= lo < hi <= 100, got {percentiles!r}")
    x_unc = isinstance(x, UncertainSeries)
    y_unc = isinstance(y, UncertainSeries)
    if x_unc != y_unc:
        raise InvalidParams("x and y must both be TimeSeries or both UncertainSeries")
    if x_unc:
        if resamples < 1:
            raise InvalidParams("uncertain inputs require resamples >= 1")
        if bin_width is None:
            raise InvalidParams("uncertain inputs require bin_width")
    else:
        if len(x) != len(y):
            raise LengthMismatch(f"series lengths differ: {len(x)} vs {len(y)}")

    n_draws = max(1, int(resamples))
    tasks = []
    for r in range(n_draws):
        if x_unc:
            xs, ys = _resample_pair(x, y, bin_width, derive_seed(segments.seed, 101, r))
        else:
            xs, ys = np.asarray(x.values, float), np.asarray(y.values, float)
        n = xs.size
        lo_len, hi_len = _segment_bounds(n, segments)
        seg_rng = make_rng(derive_seed(segments.seed, 201, r))
        for s in range(segments.count):
            length = int(seg_rng.integers(lo_len, hi_len + 1))
            start = int(seg_rng.integers(0, n - length + 1))
            tasks.append((xs[start:start + length], ys[start:start + length]))

    def run(pair):
        try:
            got = _member_curves(
                pair[0], pair[1], eta_max, f, estimator, k, l, m, tau, nn_k1, nn_k2
            )
            if not (np.all(np.isfinite(got[0])) and np.all(np.isfinite(got[1]))):
                return None
            return got
        except PredasymError:
            return None

    if n_jobs == 1:
        results = [run(t) for t in tasks]
    else:
        results = Parallel(n_jobs=n_jobs)(delayed(run)(t) for t in tasks)

    ok = [r for r in results if r is not None]
    n_failed = len(results) - len(ok)
    if not ok:
        raise NumericalError("every ensemble member failed")
    stack_xy = np.stack([r[0] for r in ok])
    stack_yx = np.stack([r[1] for r in ok])
    etas = tuple(range(1, eta_max + 1))

    def curve(stack):
        return EnsembleCurve(
            etas=etas,
            median=tuple(np.median(stack, axis=0)),
            lower=tuple(np.percentile(stack, p_lo, axis=0)),
            upper=tuple(np.percentile(stack, p_hi, axis=0)),
            percentiles=(p_lo, p_hi),
            n_members=len(ok),
            n_failed=n_failed,
        )

    return {"xy": curve(stack_xy), "yx": curve(stack_yx)}


def ensemble_to_csv_text(curves: dict) -> str:
    """Long-format CSV of ribbon curves: one row per (eta, direction)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["eta", "direction", "median", "lower", "upper"])
    for direction, c in curves.items():
        for e, md, lo, hi in zip(c.etas, c.median, c.lower, c.upper):
            writer.writerow([e, direction, repr(md), repr(lo), repr(hi)])
    return buf.getvalue()
