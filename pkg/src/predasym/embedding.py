"""Generalized delay embeddings for directed prediction.

A row of the embedding collects, at a base time t (1-based):

  * the target's future block  T(t + j*eta) for j = k..1 (k values),
  * the target's history       T(t - i*tau) for i = 0..l-1 (l values),
  * the source's history       S(t - i*tau) for i = 0..m-1 (m values),
  * optional conditional histories, n values total split evenly over the
    conditional series at lags 0, tau, ..., (depth-1)*tau.

The prediction lag eta is signed: positive rows look forward in time,
negative rows look backward, and both directions share base-time alignment so
forward and backward spectra are computed over comparable samples. k > 1
stacks future values at multiples of eta; that convention is experimental and
only the geometry is guaranteed.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_values
from .exceptions import EmptyEmbedding, InvalidParams, LengthMismatch


@dataclass(frozen=True)
class EmbeddingSpec:
    """Embedding parameters: future depth k, histories l/m, conditionals n,
    delay tau, signed prediction lag eta."""

    k: int = 1
    l: int = 1
    m: int = 1
    n: int = 0
    tau: int = 1
    eta: int = 1

    def __post_init__(self):
        for name in ("k", "l", "m", "n", "tau", "eta"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise InvalidParams(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.k < 1 or self.l < 1 or self.m < 1:
            raise InvalidParams("k, l and m must be >= 1")
        if self.n < 0:
            raise InvalidParams("n must be >= 0")
        if self.tau < 1:
            raise InvalidParams("tau must be >= 1")
        if self.eta == 0:
            raise InvalidParams("eta must be nonzero")

    @property
    def dim(self) -> int:
        return self.k + self.l + self.m + self.n

    def history_margin(self) -> int:
        """Steps of history consumed before the base time."""
        depth = max(self.l, self.m)
        return (depth - 1) * self.tau

    def cond_depth(self, n_conds: int) -> int:
        if self.n == 0:
            return 0
        if n_conds == 0:
            raise InvalidParams("n > 0 requires at least one conditional series")
        if self.n % n_conds != 0:
            raise InvalidParams(
                f"n={self.n} must split evenly over {n_conds} conditional series"
            )
        return self.n // n_conds


@dataclass(frozen=True)
class Embedding:
    """Embedding rows plus the bookkeeping estimators need."""

    points: np.ndarray                  # (rows, dim) float64
    column_map: tuple                   # ((role, lag), ...) per column
    source_length: int                  # length of the embedded series
    spec: EmbeddingSpec

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def rows(self) -> int:
        return int(self.points.shape[0])

    def block(self, role_prefix: str) -> np.ndarray:
        """Columns whose role starts with `role_prefix`."""
        cols = [i for i, (role, _) in enumerate(self.column_map) if role.startswith(role_prefix)]
        return self.points[:, cols]

    @property
    def future(self) -> np.ndarray:
        return self.block("target_future")

    @property
    def target_history(self) -> np.ndarray:
        return self.block("target_history")

    @property
    def source_history(self) -> np.ndarray:
        return self.block("source_history")

    @property
    def conditioning(self) -> np.ndarray:
        """Target history plus conditional columns (the conditioning set)."""
        cols = [
            i
            for i, (role, _) in enumerate(self.column_map)
            if role.startswith("target_history") or role.startswith("cond")
        ]
        return self.points[:, cols]


def valid_range(N, spec, n_conds=0):
    """Inclusive 1-based range (t_min, t_max) of base times whose full row
    stays inside [1, N]. May be empty (t_max < t_min)."""
    if N < 1:
        raise InvalidParams(f"N must be >= 1, got {N}")
    depth_c = spec.cond_depth(n_conds)
    past = max(spec.l - 1, spec.m - 1, depth_c - 1) * spec.tau
    t_min = 1 + past
    t_max = N
    extreme = spec.k * spec.eta
    if spec.eta > 0:
        t_max = min(t_max, N - extreme)
    else:
        t_min = max(t_min, 1 - extreme)
    return t_min, t_max


def build_embedding(source, target, spec, conds=()) -> Embedding:
    """Build the embedding rows for a source/target pair.

    `source`, `target` and each conditional accept a TimeSeries or 1-D array;
    all must share one length. Raises EmptyEmbedding when no base time fits.
    """
    s = as_values(source, "source")
    t = as_values(target, "target")
    cond_vals = [as_values(c, f"conds[{i}]") for i, c in enumerate(conds)]
    N = t.size
    if s.size != N:
        raise LengthMismatch(f"source length {s.size} != target length {N}")
    for i, cv in enumerate(cond_vals):
        if cv.size != N:
            raise LengthMismatch(f"conds[{i}] length {cv.size} != target length {N}")
    depth_c = spec.cond_depth(len(cond_vals))
    if spec.n == 0 and cond_vals:
        raise InvalidParams("conditional series supplied but n == 0")

    t_min, t_max = valid_range(N, spec, n_conds=len(cond_vals))
    if t_max < t_min:
        raise EmptyEmbedding(
            f"no valid base times for N={N} with k={spec.k}, l={spec.l}, "
            f"m={spec.m}, n={spec.n}, tau={spec.tau}, eta={spec.eta}"
        )
    base = np.arange(t_min - 1, t_max)  # 0-based base times

    cols = []
    cmap = []
    for j in range(spec.k, 0, -1):
        cols.append(t[base + j * spec.eta])
        cmap.append(("target_future", j * spec.eta))
    for i in range(spec.l):
        cols.append(t[base - i * spec.tau])
        cmap.append(("target_history", -i * spec.tau))
    for i in range(spec.m):
        cols.append(s[base - i * spec.tau])
        cmap.append(("source_history", -i * spec.tau))
    for ci, cv in enumerate(cond_vals):
        for i in range(depth_c):
            cols.append(cv[base - i * spec.tau])
            cmap.append((f"cond{ci}", -i * spec.tau))

    points = np.column_stack(cols)
    return Embedding(points=points, column_map=tuple(cmap), source_length=N, spec=spec)


def acf_first_zero_crossing(x):
    """Smallest lag >= 1 where the sample autocorrelation is <= 0, or None.

    A standard delay-picking helper for choosing tau on real data.
    """
    v = as_values(x, "x")
    v = v - v.mean()
    denom = float(np.dot(v, v))
    if denom == 0:
        return None
    for lag in range(1, v.size):
        if float(np.dot(v[lag:], v[:-lag])) / denom <= 0:
            return lag
    return None
