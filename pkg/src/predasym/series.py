"""Time-series containers and file I/O.

Containers are frozen dataclasses over immutable float64 arrays. Two file
formats are supported: CSV (RFC-4180, header row required, one column per
series) and JSON ({"columns": [{"label", "dt", "values"}, ...]}). Uncertain
series use a four-column CSV layout: value_mean, value_sd, age_mean, age_sd.

Missing data is rejected, never imputed: empty, NaN or infinite cells raise
NonFinite; ragged rows, non-numeric cells and header-only files raise
ParseError; columns that disagree in length or sampling step raise
LengthMismatch.
"""

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .exceptions import LengthMismatch, NonFinite, ParseError, InvalidParams
from .rng import Seed, make_rng


def _freeze(values, name="values") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidParams(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise ParseError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains NaN or infinite entries")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A regularly sampled scalar series: finite float64 values, step dt > 0."""

    values: np.ndarray
    dt: float = 1.0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values, "values"))
        if not (isinstance(self.dt, (int, float)) and math.isfinite(self.dt) and self.dt > 0):
            raise InvalidParams(f"dt must be a finite positive number, got {self.dt!r}")
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self):
        return int(self.values.size)


@dataclass(frozen=True)
class MultiSeries:
    """A bundle of TimeSeries sharing length and sampling step."""

    columns: tuple

    def __post_init__(self):
        cols = tuple(self.columns)
        if not cols:
            raise ParseError("MultiSeries needs at least one column")
        n = len(cols[0])
        dt = cols[0].dt
        for c in cols:
            if len(c) != n:
                raise LengthMismatch(
                    f"column {c.label!r} has length {len(c)}, expected {n}"
                )
            if c.dt != dt:
                raise LengthMismatch(f"column {c.label!r} has dt {c.dt}, expected {dt}")
        object.__setattr__(self, "columns", cols)

    @property
    def labels(self):
        return tuple(c.label for c in self.columns)

    @property
    def length(self):
        return len(self.columns[0])

    def __len__(self):
        return len(self.columns)

    def __getitem__(self, key) -> TimeSeries:
        if isinstance(key, str):
            for c in self.columns:
                if c.label == key:
                    return c
            raise KeyError(f"no column labeled {key!r}; have {self.labels}")
        return self.columns[key]

    def to_array(self) -> np.ndarray:
        """Stack columns into an (N, n_columns) array."""
        return np.column_stack([c.values for c in self.columns])


@dataclass(frozen=True)
class UncertainSeries:
    """Measurements with Gaussian uncertainty in both value and age.

    Ages must be strictly increasing in the mean; standard deviations must be
    nonnegative and finite.
    """

    value_mean: np.ndarray
    value_sd: np.ndarray
    age_mean: np.ndarray
    age_sd: np.ndarray
    label: str = ""

    def __post_init__(self):
        vm = _freeze(self.value_mean, "value_mean")
        vs = _freeze(self.value_sd, "value_sd")
        am = _freeze(self.age_mean, "age_mean")
        asd = _freeze(self.age_sd, "age_sd")
        n = vm.size
        for name, arr in (("value_sd", vs), ("age_mean", am), ("age_sd", asd)):
            if arr.size != n:
                raise LengthMismatch(f"{name} has length {arr.size}, expected {n}")
        if np.any(vs < 0) or np.any(asd < 0):
            raise InvalidParams("standard deviations must be nonnegative")
        if n > 1 and not np.all(np.diff(am) > 0):
            raise InvalidParams("age_mean must be strictly increasing")
        object.__setattr__(self, "value_mean", vm)
        object.__setattr__(self, "value_sd", vs)
        object.__setattr__(self, "age_mean", am)
        object.__setattr__(self, "age_sd", asd)

    def __len__(self):
        return int(self.value_mean.size)


def _parse_cell(text, where):
    stripped = text.strip()
    if stripped == "":
        raise NonFinite(f"missing value at {where}")
    try:
        value = float(stripped)
    except ValueError as exc:
        raise ParseError(f"non-numeric cell {text!r} at {where}") from exc
    if not math.isfinite(value):
        raise NonFinite(f"non-finite value {text!r} at {where}")
    return value


def _read_csv_table(path):
    try:
        with open(path, "r", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(rows) == 1:
        raise ParseError(f"{path}: header only, no data rows")
    width = len(header)
    data = np.empty((len(rows) - 1, width))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise ParseError(f"{path}: row {i} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            data[i - 2, j] = _parse_cell(cell, f"{path}:{i}:{header[j]}")
    return header, data


def _infer_format(path, format):
    if format is not None:
        return format
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".json":
        return "json"
    return "csv"


def load_series(path, format=None, columns=None, dt=1.0) -> MultiSeries:
    """Load a MultiSeries from a CSV or JSON file.

    `columns` selects a subset by label (order preserved); None keeps all.
    CSV columns take the sampling step `dt`; JSON columns carry their own.
    """
    format = _infer_format(path, format)
    if format == "csv":
        header, data = _read_csv_table(path)
        series = [
            TimeSeries(data[:, j], dt=dt, label=header[j]) for j in range(len(header))
        ]
    elif format == "json":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot parse {path}: {exc}") from exc
        cols = doc.get("columns") if isinstance(doc, dict) else None
        if not cols:
            raise ParseError(f"{path}: expected an object with a 'columns' list")
        series = []
        for entry in cols:
            series.append(
                TimeSeries(
                    np.asarray(entry.get("values", []), dtype=np.float64),
                    dt=float(entry.get("dt", 1.0)),
                    label=str(entry.get("label", "")),
                )
            )
    else:
        raise InvalidParams(f"unknown format {format!r}; use 'csv' or 'json'")

    if columns is not None:
        by_label = {s.label: s for s in series}
        missing = [c for c in columns if c not in by_label]
        if missing:
            raise ParseError(f"{path}: no column(s) labeled {missing}")
        series = [by_label[c] for c in columns]
    return MultiSeries(tuple(series))


def save_series(ms: MultiSeries, path, format=None) -> None:
    """Write a MultiSeries; values round-trip through repr exactly."""
    format = _infer_format(path, format)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(ms.labels)
        for row in ms.to_array():
            writer.writerow([repr(float(v)) for v in row])
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    elif format == "json":
        doc = {
            "columns": [
                {"label": c.label, "dt": c.dt, "values": [float(v) for v in c.values]}
                for c in ms.columns
            ]
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
            fh.write("\n")
    else:
        raise InvalidParams(f"unknown format {format!r}; use 'csv' or 'json'")


_UNCERTAIN_COLUMNS = ("value_mean", "value_sd", "age_mean", "age_sd")


def load_uncertain_series(path, label="") -> UncertainSeries:
    """Load an UncertainSeries from its four-column CSV layout."""
    header, data = _read_csv_table(path)
    missing = [c for c in _UNCERTAIN_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"{path}: missing column(s) {missing}")
    cols = {name: data[:, header.index(name)] for name in _UNCERTAIN_COLUMNS}
    return UncertainSeries(
        cols["value_mean"], cols["value_sd"], cols["age_mean"], cols["age_sd"], label=label
    )


def save_uncertain_series(us: UncertainSeries, path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_UNCERTAIN_COLUMNS)
    for vm, vs, am, asd in zip(us.value_mean, us.value_sd, us.age_mean, us.age_sd):
        writer.writerow([repr(float(vm)), repr(float(vs)), repr(float(am)), repr(float(asd))])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(buf.getvalue())


def add_observational_noise(ts: TimeSeries, fraction: float, seed: Seed) -> TimeSeries:
    """Add Gaussian noise with sd = fraction × the series' own sd.

    fraction 0 (or a constant series) returns the input unchanged. The draw is
    deterministic under `seed`.
    """
    if not (isinstance(fraction, (int, float)) and math.isfinite(fraction) and fraction >= 0):
        raise InvalidParams(f"fraction must be finite and >= 0, got {fraction!r}")
    if len(ts) < 2:
        raise InvalidParams("need at least 2 points to scale noise to the series sd")
    if fraction == 0:
        return ts
    sd = float(np.std(ts.values))
    if sd == 0:
        return ts
    noise = make_rng(seed).normal(0.0, fraction * sd, size=len(ts))
    return TimeSeries(ts.values + noise, dt=ts.dt, label=ts.label)
