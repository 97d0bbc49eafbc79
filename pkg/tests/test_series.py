import json
import os

import numpy as np
import pytest

from predasym.exceptions import (
    InvalidParams,
    LengthMismatch,
    NonFinite,
    ParseError,
)
from predasym.series import (
    MultiSeries,
    TimeSeries,
    UncertainSeries,
    add_observational_noise,
    load_series,
    load_uncertain_series,
    save_series,
    save_uncertain_series,
)


def test_timeseries_basics():
    ts = TimeSeries([1.0, 2.0, 3.0], dt=0.5, label="x")
    assert len(ts) == 3
    assert ts.dt == 0.5
    assert ts.values.dtype == np.float64
    assert not ts.values.flags.writeable


def test_timeseries_rejects_nan_and_empty():
    with pytest.raises(NonFinite):
        TimeSeries([1.0, np.nan])
    with pytest.raises(ParseError):
        TimeSeries([])
    with pytest.raises(InvalidParams):
        TimeSeries([[1.0, 2.0]])
    with pytest.raises(InvalidParams):
        TimeSeries([1.0, 2.0], dt=0.0)


def test_multiseries_length_and_dt_agreement():
    a = TimeSeries([1.0, 2.0], label="a")
    b = TimeSeries([3.0, 4.0, 5.0], label="b")
    with pytest.raises(LengthMismatch):
        MultiSeries((a, b))
    c = TimeSeries([3.0, 4.0], dt=2.0, label="c")
    with pytest.raises(LengthMismatch):
        MultiSeries((a, c))


def test_multiseries_lookup():
    ms = MultiSeries((TimeSeries([1.0, 2.0], label="x"), TimeSeries([3.0, 4.0], label="y")))
    assert ms["y"].values[0] == 3.0
    assert ms[0].label == "x"
    assert ms.labels == ("x", "y")
    assert ms.length == 2
    arr = ms.to_array()
    assert arr.shape == (2, 2)


def test_csv_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(0)
    ms = MultiSeries((
        TimeSeries(rng.normal(size=40), label="x"),
        TimeSeries(rng.normal(size=40), label="y"),
    ))
    path = str(tmp_path / "pair.csv")
    save_series(ms, path)
    back = load_series(path)
    assert back.labels == ("x", "y")
    assert np.array_equal(back["x"].values, ms["x"].values)
    assert np.array_equal(back["y"].values, ms["y"].values)


def test_json_roundtrip_keeps_dt(tmp_path):
    ms = MultiSeries((TimeSeries([1.0, 2.0, 3.0], dt=0.25, label="x"),))
    path = str(tmp_path / "one.json")
    save_series(ms, path)
    back = load_series(path)
    assert back["x"].dt == 0.25
    assert np.array_equal(back["x"].values, [1.0, 2.0, 3.0])


def test_load_rejects_ragged_and_nonnumeric(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n1.0,2.0\n3.0\n")
    with pytest.raises(ParseError):
        load_series(str(p))
    p.write_text("x,y\n1.0,apple\n")
    with pytest.raises(ParseError):
        load_series(str(p))
    p.write_text("x,y\n")
    with pytest.raises(ParseError):
        load_series(str(p))


def test_load_rejects_missing_values(tmp_path):
    p = tmp_path / "gap.csv"
    p.write_text("x,y\n1.0,2.0\n,3.0\n")
    with pytest.raises((ParseError, NonFinite)):
        load_series(str(p))


def test_load_column_selection(tmp_path):
    p = tmp_path / "three.csv"
    p.write_text("a,b,c\n1.0,2.0,3.0\n4.0,5.0,6.0\n")
    ms = load_series(str(p), columns=["c", "a"])
    assert ms.labels == ("c", "a")
    with pytest.raises(ParseError):
        load_series(str(p), columns=["nope"])


def test_uncertain_roundtrip(tmp_path):
    us = UncertainSeries(
        value_mean=[1.0, 2.0],
        value_sd=[0.1, 0.2],
        age_mean=[10.0, 20.0],
        age_sd=[0.5, 0.5],
        label="u",
    )
    path = str(tmp_path / "u.csv")
    save_uncertain_series(us, path)
    back = load_uncertain_series(path, label="u")
    assert np.array_equal(back.value_mean, us.value_mean)
    assert np.array_equal(back.age_sd, us.age_sd)
    assert back.label == "u"


def test_uncertain_missing_column(tmp_path):
    p = tmp_path / "u.csv"
    p.write_text("value_mean,value_sd,age_mean\n1.0,0.1,10.0\n")
    with pytest.raises(ParseError):
        load_uncertain_series(str(p))


def test_observational_noise_zero_fraction_identity():
    ts = TimeSeries([1.0, 2.0, 3.0], label="x")
    assert add_observational_noise(ts, 0.0, seed=1) is ts


def test_observational_noise_constant_series_identity():
    ts = TimeSeries([2.0, 2.0, 2.0], label="x")
    assert add_observational_noise(ts, 0.5, seed=1) is ts


def test_observational_noise_scale_and_determinism():
    rng = np.random.default_rng(3)
    ts = TimeSeries(rng.normal(size=20000), label="x")
    noisy1 = add_observational_noise(ts, 0.5, seed=9)
    noisy2 = add_observational_noise(ts, 0.5, seed=9)
    assert np.array_equal(noisy1.values, noisy2.values)
    added = noisy1.values - ts.values
    # noise sd is fraction * series sd, within sampling error
    assert abs(np.std(added) / np.std(ts.values) - 0.5) < 0.02


def test_observational_noise_rejects_bad_fraction():
    ts = TimeSeries([1.0, 2.0], label="x")
    with pytest.raises(InvalidParams):
        add_observational_noise(ts, -0.1, seed=0)
