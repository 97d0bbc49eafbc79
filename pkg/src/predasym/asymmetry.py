"""The predictive-asymmetry statistic and its detection rule.

Given a TE spectrum over signed lags, the asymmetry at horizon eta is

    A(eta) = sum_{v=1..eta} TE(v) - sum_{v=1..eta} TE(-v)      (bits)

and the normalized statistic divides by a fraction of the spectrum's bulk:

    A_f(eta) = A(eta) / ((f/eta) * sum_{v in +-1..+-eta} TE(v)).

A pair is flagged causal in a direction when A_f exceeds the threshold
(strictly; default 1). An all-zero spectrum makes the statistic undefined:
the normalized value is NaN and the verdict is negative.
"""

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_pair_array
from .estimators import TESpectrum, te_spectrum
from .exceptions import InvalidParams, LagOutOfRange


def predictive_asymmetry(spectrum: TESpectrum, eta: int) -> float:
    """Cumulative forward-minus-backward TE at horizon eta (bits)."""
    if eta < 1:
        raise LagOutOfRange(f"eta must be >= 1, got {eta}")
    if eta > spectrum.eta_max:
        raise LagOutOfRange(f"eta={eta} exceeds spectrum eta_max={spectrum.eta_max}")
    fwd = sum(spectrum.value_at(v) for v in range(1, eta + 1))
    bwd = sum(spectrum.value_at(-v) for v in range(1, eta + 1))
    return float(fwd - bwd)


def normalized_asymmetry(spectrum: TESpectrum, eta: int, f: float = 1.0) -> float:
    """Scale-free asymmetry; NaN when the spectrum sums to exactly zero."""
    if not (isinstance(f, (int, float)) and math.isfinite(f) and f > 0):
        raise InvalidParams(f"f must be finite and > 0, got {f!r}")
    a = predictive_asymmetry(spectrum, eta)
    total = sum(
        spectrum.value_at(v) + spectrum.value_at(-v) for v in range(1, eta + 1)
    )
    denom = (f / eta) * total
    if denom == 0.0:
        return float("nan")
    return a / denom


def detect(a_norm: float, threshold: float = 1.0) -> bool:
    """Detection verdict: strictly above threshold; NaN is negative."""
    return bool(a_norm > threshold)


@dataclass(frozen=True)
class AsymmetryCurve:
    """A(eta) and A_f(eta) over eta = 1..eta_max for one direction."""

    etas: np.ndarray
    values: np.ndarray       # A(eta), bits
    normalized: np.ndarray   # A_f(eta), dimensionless (NaN where undefined)
    f: float

    def __post_init__(self):
        etas = np.asarray(self.etas, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        normalized = np.asarray(self.normalized, dtype=np.float64)
        if not (etas.size == values.size == normalized.size):
            raise InvalidParams("etas, values and normalized disagree in length")
        if etas.size == 0 or etas[0] != 1 or np.any(np.diff(etas) != 1):
            raise InvalidParams("etas must be 1..eta_max")
        for arr in (etas, values, normalized):
            arr.flags.writeable = False
        object.__setattr__(self, "etas", etas)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "normalized", normalized)

    @property
    def eta_max(self) -> int:
        return int(self.etas[-1])

    def at(self, eta: int):
        """(A, A_f) at one horizon."""
        if not 1 <= eta <= self.eta_max:
            raise LagOutOfRange(f"eta={eta} outside 1..{self.eta_max}")
        return float(self.values[eta - 1]), float(self.normalized[eta - 1])


def asymmetry_curve(spectrum: TESpectrum, f: float = 1.0) -> AsymmetryCurve:
    """Evaluate the statistic at every horizon the spectrum covers."""
    etas = np.arange(1, spectrum.eta_max + 1)
    values = np.array([predictive_asymmetry(spectrum, int(e)) for e in etas])
    normalized = np.array([normalized_asymmetry(spectrum, int(e), f=f) for e in etas])
    return AsymmetryCurve(etas=etas, values=values, normalized=normalized, f=f)


class PredictiveAsymmetryTest(BaseEstimator):
    """Directed-coupling test for a pair of series, estimator-style.

    fit(X) takes an (N, 2) matrix whose columns are the two series (call them
    x and y), estimates TE spectra in both directions and evaluates the
    asymmetry statistic. Fitted attributes:

      spectrum_xy_, spectrum_yx_   TESpectrum per direction
      curve_xy_, curve_yx_         AsymmetryCurve per direction
      asymmetry_xy_, asymmetry_yx_ A(eta_max), bits
      normalized_xy_, normalized_yx_  A_f(eta_max)
      detections_                  boolean [x drives y, y drives x]

    Parameters mirror te_spectrum; `estimator` is "vf" or "nn".
    """

    def __init__(
        self,
        eta_max=10,
        f=1.0,
        estimator="vf",
        k=1,
        l=1,
        m=1,
        tau=1,
        nn_k1=2,
        nn_k2=3,
        threshold=1.0,
        n_jobs=1,
    ):
        self.eta_max = eta_max
        self.f = f
        self.estimator = estimator
        self.k = k
        self.l = l
        self.m = m
        self.tau = tau
        self.nn_k1 = nn_k1
        self.nn_k2 = nn_k2
        self.threshold = threshold
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = check_pair_array(X)
        x_col, y_col = X[:, 0], X[:, 1]
        common = dict(
            eta_max=self.eta_max,
            estimator=self.estimator,
            k=self.k,
            l=self.l,
            m=self.m,
            tau=self.tau,
            nn_k1=self.nn_k1,
            nn_k2=self.nn_k2,
            n_jobs=self.n_jobs,
        )
        self.spectrum_xy_ = te_spectrum(x_col, y_col, **common)
        self.spectrum_yx_ = te_spectrum(y_col, x_col, **common)
        self.curve_xy_ = asymmetry_curve(self.spectrum_xy_, f=self.f)
        self.curve_yx_ = asymmetry_curve(self.spectrum_yx_, f=self.f)
        self.asymmetry_xy_, self.normalized_xy_ = self.curve_xy_.at(self.curve_xy_.eta_max)
        self.asymmetry_yx_, self.normalized_yx_ = self.curve_yx_.at(self.curve_yx_.eta_max)
        self.detections_ = np.array(
            [
                detect(self.normalized_xy_, self.threshold),
                detect(self.normalized_yx_, self.threshold),
            ]
        )
        return self

    def fit_predict(self, X, y=None):
        """Fit and return the two directed verdicts [x->y, y->x]."""
        return self.fit(X).detections_
