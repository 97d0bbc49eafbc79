import math

import numpy as np
import pytest

from conftest import ar1_pair
from predasym.asymmetry import (
    AsymmetryCurve,
    PredictiveAsymmetryTest,
    asymmetry_curve,
    detect,
    normalized_asymmetry,
    predictive_asymmetry,
)
from predasym.estimators import TESpectrum
from predasym.exceptions import InvalidParams, LagOutOfRange


def spectrum_from(values_by_lag):
    lags = sorted(values_by_lag)
    return TESpectrum(
        lags=np.array(lags),
        values=np.array([values_by_lag[v] for v in lags]),
        estimator_id="vf",
    )


def test_asymmetry_hand_case():
    spec = spectrum_from({1: 0.5, 2: 0.3, -1: 0.1, -2: 0.1})
    assert predictive_asymmetry(spec, 1) == pytest.approx(0.4)
    assert predictive_asymmetry(spec, 2) == pytest.approx(0.6)


def test_normalized_hand_case():
    # A(2) = 0.6, denominator = (1/2) * (0.5+0.3+0.1+0.1) = 0.5
    spec = spectrum_from({1: 0.5, 2: 0.3, -1: 0.1, -2: 0.1})
    assert normalized_asymmetry(spec, 2, f=1.0) == pytest.approx(1.2)
    # f=4 shrinks the statistic fourfold
    assert normalized_asymmetry(spec, 2, f=4.0) == pytest.approx(0.3)


def test_antisymmetry_under_half_exchange():
    rng = np.random.default_rng(0)
    vals = rng.uniform(0.0, 1.0, size=5)
    fwd = {v: vals[v - 1] for v in range(1, 6)}
    bwd = {-v: vals[5 - v] for v in range(1, 6)}
    spec = spectrum_from({**fwd, **bwd})
    swapped = spectrum_from(
        {v: spec.value_at(-v) for v in range(1, 6)}
        | {-v: spec.value_at(v) for v in range(1, 6)}
    )
    for eta in range(1, 6):
        assert predictive_asymmetry(swapped, eta) == pytest.approx(
            -predictive_asymmetry(spec, eta)
        )
        a = normalized_asymmetry(spec, eta)
        b = normalized_asymmetry(swapped, eta)
        assert b == pytest.approx(-a)


def test_scale_invariance_of_normalized():
    rng = np.random.default_rng(1)
    base = {v: float(rng.uniform(0.01, 1.0)) for v in range(-6, 7) if v != 0}
    spec = spectrum_from(base)
    for lam in (0.1, 3.0, 250.0):
        scaled = spectrum_from({v: lam * w for v, w in base.items()})
        for eta in (1, 3, 6):
            assert normalized_asymmetry(scaled, eta) == pytest.approx(
                normalized_asymmetry(spec, eta), rel=1e-12
            )
            assert detect(normalized_asymmetry(scaled, eta)) == detect(
                normalized_asymmetry(spec, eta)
            )
            # the raw asymmetry scales linearly
            assert predictive_asymmetry(scaled, eta) == pytest.approx(
                lam * predictive_asymmetry(spec, eta), rel=1e-12
            )


def test_all_zero_spectrum_is_nan_and_negative():
    spec = spectrum_from({v: 0.0 for v in (-3, -2, -1, 1, 2, 3)})
    assert predictive_asymmetry(spec, 3) == 0.0
    a = normalized_asymmetry(spec, 3)
    assert math.isnan(a)
    assert detect(a) is False


def test_detect_is_strict():
    assert detect(1.0) is False
    assert detect(1.0 + 1e-12) is True
    assert detect(0.5, threshold=0.4) is True
    assert detect(float("nan")) is False


def test_asymmetry_eta_bounds():
    spec = spectrum_from({1: 0.5, -1: 0.1})
    with pytest.raises(LagOutOfRange):
        predictive_asymmetry(spec, 0)
    with pytest.raises(LagOutOfRange):
        predictive_asymmetry(spec, 2)
    with pytest.raises(InvalidParams):
        normalized_asymmetry(spec, 1, f=0.0)
    with pytest.raises(InvalidParams):
        normalized_asymmetry(spec, 1, f=-1.0)


def test_curve_matches_pointwise_functions():
    spec = spectrum_from({1: 0.5, 2: 0.3, 3: 0.2, -1: 0.1, -2: 0.1, -3: 0.05})
    curve = asymmetry_curve(spec, f=2.0)
    assert curve.eta_max == 3
    for eta in (1, 2, 3):
        a, an = curve.at(eta)
        assert a == pytest.approx(predictive_asymmetry(spec, eta))
        assert an == pytest.approx(normalized_asymmetry(spec, eta, f=2.0))
    with pytest.raises(LagOutOfRange):
        curve.at(4)


def test_curve_validation():
    with pytest.raises(InvalidParams):
        AsymmetryCurve(etas=[2, 3], values=[0.1, 0.2], normalized=[1.0, 2.0], f=1.0)
    with pytest.raises(InvalidParams):
        AsymmetryCurve(etas=[1, 3], values=[0.1, 0.2], normalized=[1.0, 2.0], f=1.0)
    with pytest.raises(InvalidParams):
        AsymmetryCurve(etas=[1, 2], values=[0.1], normalized=[1.0, 2.0], f=1.0)


def test_estimator_interface_on_known_direction():
    x, y = ar1_pair(n=4000, seed=11)
    test = PredictiveAsymmetryTest(eta_max=10)
    out = test.fit_predict(np.column_stack([x, y]))
    assert out.tolist() == [True, False]
    assert test.normalized_xy_ > 1.0
    assert test.normalized_yx_ < 1.0
    assert test.asymmetry_xy_ > 0.0
    assert test.asymmetry_yx_ < 0.0
    assert test.spectrum_xy_.eta_max == 10
    assert test.curve_yx_.eta_max == 10


def test_estimator_get_set_params_round_trip():
    test = PredictiveAsymmetryTest(eta_max=5, f=2.0, estimator="nn")
    params = test.get_params()
    assert params["eta_max"] == 5
    assert params["f"] == 2.0
    assert params["estimator"] == "nn"
    clone = PredictiveAsymmetryTest().set_params(**params)
    assert clone.get_params() == params


def test_estimator_rejects_bad_input_shape():
    with pytest.raises(InvalidParams):
        PredictiveAsymmetryTest(eta_max=2).fit(np.zeros((10, 3)))
    with pytest.raises(InvalidParams):
        PredictiveAsymmetryTest(eta_max=2).fit(np.zeros(10))


def test_estimator_deterministic():
    x, y = ar1_pair(n=1500, seed=12)
    X = np.column_stack([x, y])
    t1 = PredictiveAsymmetryTest(eta_max=5).fit(X)
    t2 = PredictiveAsymmetryTest(eta_max=5).fit(X)
    assert np.array_equal(t1.spectrum_xy_.values, t2.spectrum_xy_.values)
    assert np.array_equal(t1.curve_yx_.normalized, t2.curve_yx_.normalized)
