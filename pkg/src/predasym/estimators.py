"""Transfer-entropy estimators and spectra.

Two estimators are provided, both in bits:

  * visitation frequency ("vf"): plug-in conditional mutual information from
    box-occupation frequencies on a regular grid; reported as the average over
    the two partitions given by the bin-count heuristic.
  * nearest neighbor ("nn"): the Kraskov-Stoegbauer-Grassberger (KSG, variant
    1) mutual-information estimator under the max-norm, combined as
    TE = MI(T_f; (S_pp, T_pp)) - MI(T_f; T_pp).

Distances use no jitter; marginal neighborhoods count points at distance <=
the k-th neighbor distance, so results are deterministic for fixed input.
"""

from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.spatial import cKDTree
from scipy.special import digamma

from .embedding import Embedding, EmbeddingSpec, build_embedding
from .exceptions import (
    DegenerateDistances,
    InvalidParams,
    LagOutOfRange,
    TooFewPoints,
)

_LN2 = float(np.log(2.0))


def binning_heuristic(n_samples: int, embed_dim: int):
    """Bin counts (b, b+1) with b = floor(n_samples ** (1/(embed_dim+1))),
    clamped to b >= 2. Integer-exact: no floating-point floor artifacts."""
    if n_samples < 1:
        raise InvalidParams(f"n_samples must be >= 1, got {n_samples}")
    if embed_dim < 1:
        raise InvalidParams(f"embed_dim must be >= 1, got {embed_dim}")
    power = embed_dim + 1
    b = max(2, int(round(float(n_samples) ** (1.0 / power))))
    while b > 2 and b**power > n_samples:
        b -= 1
    while (b + 1) ** power <= n_samples:
        b += 1
    b = max(2, b)
    return b, b + 1


@dataclass(frozen=True)
class PartitionSpec:
    """A regular grid partition: per-axis extents and a common bin count.

    Extents are widened by a 1e-9 relative margin so every data point falls in
    exactly one box (right-open intervals, the last one closed).
    """

    bins_per_axis: int
    extent: tuple  # ((lo, hi), ...) per axis

    @classmethod
    def from_points(cls, points, bins_per_axis):
        if bins_per_axis < 2:
            raise InvalidParams(f"bins_per_axis must be >= 2, got {bins_per_axis}")
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        span = hi - lo
        pad = 1e-9 * np.where(span > 0, span, 1.0)
        return cls(
            bins_per_axis=int(bins_per_axis),
            extent=tuple((float(a), float(b + p)) for a, b, p in zip(lo, hi, pad)),
        )

    def assign(self, points) -> np.ndarray:
        """Integer box index per axis, shape (rows, dim)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        lo = np.array([e[0] for e in self.extent])
        hi = np.array([e[1] for e in self.extent])
        width = (hi - lo) / self.bins_per_axis
        width = np.where(width > 0, width, 1.0)
        idx = np.floor((pts - lo) / width).astype(np.int64)
        return np.clip(idx, 0, self.bins_per_axis - 1)

    def box_probabilities(self, points) -> np.ndarray:
        """Occupation frequency of every visited box; sums to 1."""
        codes = _mix_codes(self.assign(points), self.bins_per_axis)
        _, counts = np.unique(codes, return_counts=True)
        return counts / codes.size


def _mix_codes(idx, bins) -> np.ndarray:
    """Collapse per-axis indices to one integer key per row (mixed radix)."""
    codes = np.zeros(idx.shape[0], dtype=np.int64)
    for j in range(idx.shape[1]):
        codes = codes * bins + idx[:, j]
    return codes


def _entropy_bits(codes) -> float:
    _, counts = np.unique(codes, return_counts=True)
    p = counts / codes.size
    return float(-np.sum(p * np.log2(p)))


def te_visitation_frequency(emb: Embedding, bins: int) -> float:
    """Plug-in TE (bits) at one grid partition.

    I(T_f; S_pp | C) = H(T_f,C) + H(S_pp,C) - H(C) - H(T_f,S_pp,C) with C the
    target history plus conditionals, every H a box-count entropy. Empty boxes
    contribute zero. Nonnegative by construction.
    """
    if emb.rows < 1:
        raise TooFewPoints("embedding has no rows")
    part = PartitionSpec.from_points(emb.points, bins)
    idx = part.assign(emb.points)
    roles = [role for role, _ in emb.column_map]
    fut = [i for i, r in enumerate(roles) if r.startswith("target_future")]
    src = [i for i, r in enumerate(roles) if r.startswith("source_history")]
    cond = [i for i, r in enumerate(roles) if r.startswith("target_history") or r.startswith("cond")]
    h_fc = _entropy_bits(_mix_codes(idx[:, fut + cond], bins))
    h_sc = _entropy_bits(_mix_codes(idx[:, src + cond], bins))
    h_c = _entropy_bits(_mix_codes(idx[:, cond], bins))
    h_all = _entropy_bits(_mix_codes(idx[:, fut + src + cond], bins))
    return max(0.0, h_fc + h_sc - h_c - h_all)


def te_binned_averaged(emb: Embedding) -> float:
    """TE averaged over the two heuristic partitions (bits)."""
    b_lo, b_hi = binning_heuristic(emb.source_length, emb.spec.dim)
    return 0.5 * (te_visitation_frequency(emb, b_lo) + te_visitation_frequency(emb, b_hi))


def _duplicate_pair_fraction(points) -> float:
    _, counts = np.unique(points, axis=0, return_counts=True)
    n = points.shape[0]
    if n < 2:
        return 0.0
    zero_pairs = float(np.sum(counts * (counts - 1))) / 2.0
    return zero_pairs / (n * (n - 1) / 2.0)


def _count_within(marginal, radii) -> np.ndarray:
    """Neighbors (excluding self) of each point within its own closed radius."""
    pts = np.atleast_2d(marginal)
    if pts.shape[1] == 1:
        vals = pts[:, 0]
        order = np.argsort(vals, kind="stable")
        s = vals[order]
        hi = np.searchsorted(s, vals + radii, side="right")
        lo = np.searchsorted(s, vals - radii, side="left")
        return (hi - lo - 1).astype(np.int64)
    tree = cKDTree(pts)
    counts = tree.query_ball_point(pts, radii, p=np.inf, return_length=True)
    return np.asarray(counts, dtype=np.int64) - 1


def mi_kraskov(a, b, k_neighbors=3) -> float:
    """KSG variant-1 mutual information in bits.

    `a`, `b`: (N, d) arrays (1-D accepted). Max-norm metric throughout; the
    k-th neighbor distance in the joint space sets each point's radius and
    marginal neighbors are counted at distance <= that radius. Raises
    DegenerateDistances when more than half of all pairwise joint distances
    are zero (heavily duplicated data).
    """
    A = np.asarray(a, dtype=np.float64)
    B = np.asarray(b, dtype=np.float64)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    n = A.shape[0]
    if B.shape[0] != n:
        raise InvalidParams(f"a and b disagree in length: {n} vs {B.shape[0]}")
    if k_neighbors < 1:
        raise InvalidParams(f"k_neighbors must be >= 1, got {k_neighbors}")
    if n < k_neighbors + 1:
        raise TooFewPoints(f"need at least {k_neighbors + 1} points, got {n}")
    joint = np.hstack([A, B])
    if _duplicate_pair_fraction(joint) > 0.5:
        raise DegenerateDistances(
            "more than half of all pairwise distances are zero; "
            "the neighbor estimator is undefined on this data"
        )
    tree = cKDTree(joint)
    dist, _ = tree.query(joint, k=k_neighbors + 1, p=np.inf)
    eps = dist[:, -1]
    n_a = _count_within(A, eps)
    n_b = _count_within(B, eps)
    mi_nats = digamma(k_neighbors) + digamma(n) - float(np.mean(digamma(n_a + 1) + digamma(n_b + 1)))
    return float(mi_nats / _LN2)


def te_nearest_neighbor(emb: Embedding, k1=2, k2=3, low_dim_term="target") -> float:
    """Neighbor-based TE (bits): a high-dimensional MI minus a correction MI.

    The default correction subtracts MI(T_f; T_pp) so the difference
    telescopes to I(T_f; S_pp | T_pp); low_dim_term="source" subtracts
    MI(T_f; S_pp) instead (a compatibility variant). An MI term whose axes
    include a zero-variance coordinate is taken as 0.
    """
    if low_dim_term not in ("target", "source"):
        raise InvalidParams(
            f"low_dim_term must be 'target' or 'source', got {low_dim_term!r}"
        )
    if emb.rows < max(k1, k2) + 1:
        raise TooFewPoints(
            f"embedding has {emb.rows} rows; need at least {max(k1, k2) + 1}"
        )
    fut = emb.future
    src = emb.source_history
    cond = emb.conditioning

    def term(x, y, k):
        if np.any(np.ptp(x, axis=0) == 0) or np.any(np.ptp(y, axis=0) == 0):
            return 0.0
        return mi_kraskov(x, y, k_neighbors=k)

    high = term(fut, np.hstack([src, cond]), k1)
    low = term(fut, src, k2) if low_dim_term == "source" else term(fut, cond, k2)
    return high - low


@dataclass(frozen=True)
class TESpectrum:
    """TE as a function of signed prediction lag.

    Lags run -eta_max..-1, 1..eta_max (zero excluded, symmetric about zero);
    values are bits from one estimator.
    """

    lags: np.ndarray
    values: np.ndarray
    estimator_id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if lags.size != values.size:
            raise InvalidParams("lags and values disagree in length")
        if lags.size == 0 or np.any(lags == 0):
            raise InvalidParams("lags must be nonzero and nonempty")
        lag_set = set(lags.tolist())
        if len(lag_set) != lags.size or any(-v not in lag_set for v in lag_set):
            raise InvalidParams("lags must be symmetric about zero with no repeats")
        if not np.all(np.isfinite(values)):
            raise InvalidParams("spectrum values must be finite")
        order = np.argsort(lags)
        lags = lags[order]
        values = values[order]
        lags.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", values)

    @property
    def eta_max(self) -> int:
        return int(self.lags.max())

    def value_at(self, lag: int) -> float:
        hits = np.nonzero(self.lags == lag)[0]
        if hits.size == 0:
            raise LagOutOfRange(f"lag {lag} not in spectrum (eta_max={self.eta_max})")
        return float(self.values[hits[0]])


_NAMED_ESTIMATORS = ("vf", "nn")


def te_spectrum(
    source,
    target,
    eta_max,
    estimator="vf",
    conds=(),
    k=1,
    l=1,
    m=1,
    n=0,
    tau=1,
    nn_k1=2,
    nn_k2=3,
    n_jobs=1,
) -> TESpectrum:
    """Estimate TE at every signed lag -eta_max..-1, 1..eta_max."""
    if eta_max < 1:
        raise InvalidParams(f"eta_max must be >= 1, got {eta_max}")
    if estimator not in _NAMED_ESTIMATORS:
        raise InvalidParams(f"estimator must be one of {_NAMED_ESTIMATORS}, got {estimator!r}")
    lags = [v for v in range(-eta_max, eta_max + 1) if v != 0]

    def one(lag):
        spec = EmbeddingSpec(k=k, l=l, m=m, n=n, tau=tau, eta=lag)
        emb = build_embedding(source, target, spec, conds=conds)
        if estimator == "vf":
            return te_binned_averaged(emb)
        return te_nearest_neighbor(emb, k1=nn_k1, k2=nn_k2)

    if n_jobs == 1:
        values = [one(lag) for lag in lags]
    else:
        values = Parallel(n_jobs=n_jobs)(delayed(one)(lag) for lag in lags)
    return TESpectrum(
        lags=np.array(lags),
        values=np.array(values),
        estimator_id=estimator,
        params={"k": k, "l": l, "m": m, "n": n, "tau": tau, "nn_k1": nn_k1, "nn_k2": nn_k2},
    )
