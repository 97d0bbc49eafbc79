"""Binary-classification scoring of directed detections, and the
coupling-strength x series-length benchmark sweeps.

A sweep cell draws `ensemble_size` randomized realizations of one family at
one (coupling bin, length) combination, classifies every ordered pair of
observed variables with the normalized-asymmetry test, and tallies the
verdicts against the generator's truth graph. Indirect (grandparent) chain
influence is a negative by construction of truth_graph.

Per-realization seeds derive from the master seed and the cell coordinates,
so results are reproducible cell by cell and independent of worker count.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from . import systems
from .asymmetry import PredictiveAsymmetryTest
from .exceptions import (
    EmptyMatrix,
    InvalidParams,
    LengthMismatch,
    NumericalError,
    PredasymError,
)
from .rng import Seed, derive_seed
from .series import add_observational_noise


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 0:
                raise InvalidParams(f"{name} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn
        )


def confusion(preds, truths) -> ConfusionMatrix:
    """Tally predicted against true boolean labels, element by element."""
    preds = list(preds)
    truths = list(truths)
    if len(preds) != len(truths):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(truths)} truths")
    tp = tn = fp = fn = 0
    for p, t in zip(preds, truths):
        if t:
            if p:
                tp += 1
            else:
                fn += 1
        else:
            if p:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp, tn, fp, fn)


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation in [-1, 1]; 0 when any denominator factor is 0."""
    if cm.total == 0:
        raise EmptyMatrix("confusion matrix has no counts")
    tp, tn, fp, fn = float(cm.tp), float(cm.tn), float(cm.fp), float(cm.fn)
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)


def rates(cm: ConfusionMatrix) -> dict:
    """Standard rates; an undefined rate (zero denominator) is NaN."""
    if cm.total == 0:
        raise EmptyMatrix("confusion matrix has no counts")
    tp, tn, fp, fn = cm.tp, cm.tn, cm.fp, cm.fn

    def ratio(num, den):
        return num / den if den > 0 else math.nan

    tpr = ratio(tp, tp + fn)
    tnr = ratio(tn, tn + fp)
    ppv = ratio(tp, tp + fp)
    npv = ratio(tn, tn + fn)
    f1 = ratio(2 * tp, 2 * tp + fp + fn)
    return {
        "accuracy": (tp + tn) / cm.total,
        "tpr": tpr,
        "tnr": tnr,
        "fpr": 1.0 - tnr if not math.isnan(tnr) else math.nan,
        "fnr": 1.0 - tpr if not math.isnan(tpr) else math.nan,
        "ppv": ppv,
        "npv": npv,
        "f1": f1,
    }


def classify_pair(x, y, eta_max=10, f=1.0, estimator="vf", k=1, l=1, m=1, tau=1,
                  threshold=1.0) -> dict:
    """Directed verdicts for one series pair: {"xy": x drives y, "yx": reverse}."""
    test = PredictiveAsymmetryTest(
        eta_max=eta_max, f=f, estimator=estimator, k=k, l=l, m=m, tau=tau,
        threshold=threshold,
    )
    xy, yx = test.fit_predict(np.column_stack([np.asarray(x, float), np.asarray(y, float)]))
    return {"xy": bool(xy), "yx": bool(yx)}


@dataclass(frozen=True)
class SweepCell:
    coupling_lo: float
    coupling_hi: float
    length: int
    cm: ConfusionMatrix
    mcc: float
    rates: dict
    median_a: float
    failures: int


@dataclass(frozen=True)
class SweepResult:
    family: str
    ensemble_size: int
    eta_max: int
    f: float
    estimator: str
    master_seed: Seed
    cells: tuple

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["family", "coupling_lo", "coupling_hi", "length", "tp", "tn", "fp", "fn",
             "mcc", "accuracy", "tpr", "tnr", "fpr", "fnr", "ppv", "npv", "f1",
             "median_A", "failures"]
        )
        for c in self.cells:
            writer.writerow(
                [self.family, repr(c.coupling_lo), repr(c.coupling_hi), c.length,
                 c.cm.tp, c.cm.tn, c.cm.fp, c.cm.fn, repr(c.mcc)]
                + [repr(c.rates[k]) for k in ("accuracy", "tpr", "tnr", "fpr", "fnr", "ppv", "npv", "f1")]
                + [repr(c.median_a), c.failures]
            )
        return buf.getvalue()

    def to_json_text(self) -> str:
        return json.dumps(
            {
                "family": self.family,
                "ensemble_size": self.ensemble_size,
                "eta_max": self.eta_max,
                "f": self.f,
                "estimator": self.estimator,
                "master_seed": self.master_seed,
                "cells": [
                    {
                        "coupling_lo": c.coupling_lo,
                        "coupling_hi": c.coupling_hi,
                        "length": c.length,
                        "tp": c.cm.tp, "tn": c.cm.tn, "fp": c.cm.fp, "fn": c.cm.fn,
                        "mcc": c.mcc,
                        "rates": c.rates,
                        "median_A": c.median_a,
                        "failures": c.failures,
                    }
                    for c in self.cells
                ],
            }
        )


def _coupling_bin(entry):
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return float(entry), float(entry)
    try:
        lo, hi = entry
        lo, hi = float(lo), float(hi)
    except (TypeError, ValueError) as exc:
        raise InvalidParams(f"coupling grid entries must be numbers or (lo, hi), got {entry!r}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise InvalidParams(f"coupling bin must be finite with lo <= hi, got {entry!r}")
    return lo, hi


def _one_realization(spec, seed, eta_eff, f, estimator, tau, obs_noise):
    """Generate, noise, classify all ordered pairs. Returns verdict rows or None."""
    try:
        ms = systems.generate(spec)
        fraction = systems.observational_noise_default(spec.family) if obs_noise is None else obs_noise
        cols = [
            add_observational_noise(ts, fraction, derive_seed(seed, 7, j))
            for j, ts in enumerate(ms.columns)
        ]
        edges = set(systems.truth_graph(spec))
        rows = []
        for i in range(len(cols)):
            for j in range(i + 1, len(cols)):
                test = PredictiveAsymmetryTest(
                    eta_max=eta_eff, f=f, estimator=estimator, tau=tau
                )
                test.fit(np.column_stack([cols[i].values, cols[j].values]))
                rows.append(
                    (bool(test.detections_[0]),
                     (cols[i].label, cols[j].label) in edges,
                     float(test.normalized_xy_))
                )
                rows.append(
                    (bool(test.detections_[1]),
                     (cols[j].label, cols[i].label) in edges,
                     float(test.normalized_yx_))
                )
        return rows
    except PredasymError:
        return None


def sweep(
    family,
    coupling_grid,
    length_grid,
    ensemble_size,
    eta_max=10,
    f=1.0,
    estimator="vf",
    master_seed=0,
    tau=1,
    obs_noise=None,
    n_vars=None,
    order_set=None,
    transient=None,
    n_jobs=1,
) -> SweepResult:
    """Run the detection benchmark over a coupling x length grid.

    The per-realization prediction horizon is eta_max + max_lag(spec) - 1 so
    slower interactions stay inside the summed window; var_k keeps the flat
    eta_max of its benchmark protocol. `obs_noise` overrides the per-family
    default fraction. Failed realizations (divergence, degenerate estimates)
    are dropped from the tallies and counted per cell.
    """
    bins = [_coupling_bin(e) for e in coupling_grid]
    lengths = [int(v) for v in length_grid]
    if not bins or not lengths:
        raise InvalidParams("coupling_grid and length_grid must be nonempty")
    if not isinstance(ensemble_size, (int, np.integer)) or ensemble_size < 1:
        raise InvalidParams(f"ensemble_size must be a positive integer, got {ensemble_size!r}")

    tasks = []
    for ci, (lo, hi) in enumerate(bins):
        for li, length in enumerate(lengths):
            for r in range(ensemble_size):
                seed = derive_seed(master_seed, ci, li, r)
                coupling = lo if lo == hi else (lo, hi)
                spec = systems.random_system(
                    family, coupling, length, seed,
                    n_vars=n_vars, order_set=order_set, transient=transient,
                )
                eta_eff = eta_max if family == "var_k" else eta_max + systems.max_lag(spec) - 1
                tasks.append(((ci, li), (spec, seed, eta_eff, f, estimator, tau, obs_noise)))

    if n_jobs == 1:
        outputs = [_one_realization(*args) for _, args in tasks]
    else:
        outputs = Parallel(n_jobs=n_jobs)(delayed(_one_realization)(*args) for _, args in tasks)

    per_cell = {}
    for (key, _), rows in zip(tasks, outputs):
        bucket = per_cell.setdefault(key, {"rows": [], "failures": 0})
        if rows is None:
            bucket["failures"] += 1
        else:
            bucket["rows"].extend(rows)

    cells = []
    for ci, (lo, hi) in enumerate(bins):
        for li, length in enumerate(lengths):
            bucket = per_cell[(ci, li)]
            rows = bucket["rows"]
            preds = [r[0] for r in rows]
            truths = [r[1] for r in rows]
            cm = confusion(preds, truths)
            causal_a = [r[2] for r in rows if r[1]]
            pool = causal_a if causal_a else [r[2] for r in rows]
            with np.errstate(invalid="ignore"):
                median_a = float(np.nanmedian(pool)) if pool else math.nan
            nan_rates = dict.fromkeys(
                ("accuracy", "tpr", "tnr", "fpr", "fnr", "ppv", "npv", "f1"), math.nan
            )
            cells.append(
                SweepCell(
                    coupling_lo=lo,
                    coupling_hi=hi,
                    length=length,
                    cm=cm,
                    mcc=mcc(cm) if cm.total else math.nan,
                    rates=rates(cm) if cm.total else nan_rates,
                    median_a=median_a,
                    failures=bucket["failures"],
                )
            )
    return SweepResult(
        family=family,
        ensemble_size=int(ensemble_size),
        eta_max=int(eta_max),
        f=float(f),
        estimator=estimator,
        master_seed=int(master_seed),
        cells=tuple(cells),
    )
