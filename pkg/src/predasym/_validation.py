"""Input validation helpers shared across modules."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import InvalidParams, NonFinite


def as_values(x, name="x") -> np.ndarray:
    """Coerce a TimeSeries or array-like to a finite 1-D float64 array."""
    values = getattr(x, "values", x)
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidParams(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains NaN or infinite entries")
    return arr


def check_pair_array(X) -> np.ndarray:
    """Validate a two-column sample matrix for the estimator API."""
    try:
        X = check_array(X, dtype=np.float64, ensure_all_finite=True, ensure_2d=True)
    except ValueError as exc:
        raise InvalidParams(str(exc)) from exc
    if X.shape[1] != 2:
        raise InvalidParams(f"expected exactly 2 columns (source, target), got {X.shape[1]}")
    return X
