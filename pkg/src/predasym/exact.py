"""Closed-form TE and asymmetry for linear-Gaussian pairs.

Three stationary AR(1)-type models admit exact lag covariances and therefore
exact conditional mutual information via Gaussian entropies:

  * UnidirAR1:            x(t) = a x(t-1) + w,  y(t) = c x(t-1) + v
  * BidirDistinctEigen:   x(t+1) = a x + s b y + u,  y(t+1) = a y + s c x + v
                          (b, c > 0, s in {-1, +1}; eigenvalues a +- sqrt(bc))
  * BidirJordan:          x(t+1) = (lam + a) x - b y + u,
                          y(t+1) = (lam - a) y + (a^2 / b) x + v
                          (b != 0; defective coefficient matrix, eigenvalue
                          lam twice; a = 0 is rejected since it removes the
                          x -> y coupling)

The bidirectional covariances are computed by transforming to the coefficient
matrix's spectral (or Jordan) coordinates, propagating the scalar recursions
there, and transforming back. Everything is in bits.
"""

import math
from dataclasses import dataclass

import numpy as np

from .asymmetry import AsymmetryCurve, asymmetry_curve
from .estimators import TESpectrum
from .exceptions import (
    InvalidKind,
    InvalidParams,
    LagOutOfRange,
    NotStationary,
    SingularCovariance,
)

_LOG2_2PIE = float(np.log2(2.0 * np.pi * np.e))


def _check_sigma(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise InvalidParams(f"{name} must be finite and > 0, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class UnidirAR1:
    """One-way pair: x is AR(1), y copies c times x's previous value plus noise."""

    a: float
    c: float
    sigma_x: float = 1.0
    sigma_y: float = 1.0

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise NotStationary(f"|a| must be < 1, got a={self.a}")
        _check_sigma("sigma_x", self.sigma_x)
        _check_sigma("sigma_y", self.sigma_y)


@dataclass(frozen=True)
class BidirDistinctEigen:
    """Two-way pair whose coefficient matrix has distinct real eigenvalues."""

    a: float
    b: float
    c: float
    s: float = 1.0
    sigma_u: float = 1.0
    sigma_v: float = 1.0

    def __post_init__(self):
        if self.b <= 0 or self.c <= 0:
            raise InvalidKind(f"b and c must be > 0, got b={self.b}, c={self.c}")
        if self.s not in (-1, 1, -1.0, 1.0):
            raise InvalidKind(f"s must be +1 or -1, got {self.s}")
        _check_sigma("sigma_u", self.sigma_u)
        _check_sigma("sigma_v", self.sigma_v)
        root = math.sqrt(self.b * self.c)
        for lam in (self.a + root, self.a - root):
            if abs(lam) >= 1:
                raise NotStationary(f"eigenvalue {lam:.6g} outside the unit circle")

    @property
    def eigenvalues(self):
        root = math.sqrt(self.b * self.c)
        return self.a + root, self.a - root

    def coefficient_matrix(self) -> np.ndarray:
        return np.array([[self.a, self.s * self.b], [self.s * self.c, self.a]])


@dataclass(frozen=True)
class BidirJordan:
    """Two-way pair whose coefficient matrix is defective (Jordan block)."""

    lam: float
    a: float
    b: float
    sigma_u: float = 1.0
    sigma_v: float = 1.0

    def __post_init__(self):
        if abs(self.lam) >= 1:
            raise NotStationary(f"|lam| must be < 1, got lam={self.lam}")
        if self.b == 0:
            raise InvalidKind("b must be nonzero")
        if self.a == 0:
            raise InvalidKind(
                "a = 0 removes the x -> y coupling; use the distinct-eigenvalue model"
            )
        _check_sigma("sigma_u", self.sigma_u)
        _check_sigma("sigma_v", self.sigma_v)

    def coefficient_matrix(self) -> np.ndarray:
        return np.array(
            [[self.lam + self.a, -self.b], [self.a * self.a / self.b, self.lam - self.a]]
        )


@dataclass(frozen=True)
class LagCovariance:
    """Covariance of the stacked vector (x, y at lags -eta_max..eta_max)."""

    matrix: np.ndarray
    index_map: dict
    eta_max: int

    def index(self, var: str, lag: int) -> int:
        key = (var, lag)
        if key not in self.index_map:
            raise LagOutOfRange(f"no entry for {key}; eta_max={self.eta_max}")
        return self.index_map[key]

    def submatrix(self, indices) -> np.ndarray:
        idx = list(indices)
        return self.matrix[np.ix_(idx, idx)]


def _assemble(eta_max, cov_fn):
    """Fill the stacked covariance from cov_fn(var_i, s, var_j, u)."""
    if eta_max < 1:
        raise InvalidParams(f"eta_max must be >= 1, got {eta_max}")
    lags = list(range(-eta_max, eta_max + 1))
    entries = [("x", s) for s in lags] + [("y", s) for s in lags]
    index_map = {key: i for i, key in enumerate(entries)}
    d = len(entries)
    M = np.empty((d, d))
    for i, (vi, si) in enumerate(entries):
        for j in range(i, d):
            vj, sj = entries[j]
            M[i, j] = M[j, i] = cov_fn(vi, si, vj, sj)
    return LagCovariance(matrix=M, index_map=index_map, eta_max=eta_max)


def ar1_unidir_covariance(model: UnidirAR1, eta_max: int) -> LagCovariance:
    """Exact stationary lag covariances of the one-way pair."""
    a, c = model.a, model.c
    vw = model.sigma_x**2
    vv = model.sigma_y**2
    var_x = vw / (1.0 - a * a)

    def cov(vi, s, vj, u):
        if vi == "x" and vj == "x":
            return a ** abs(s - u) * var_x
        if vi == "y" and vj == "y":
            return c * c * a ** abs(s - u) * var_x + (vv if s == u else 0.0)
        if vi == "y":  # cov(y_s, x_u) = cov(x_u, y_s)
            s, u = u, s
        return c * a ** abs(u - 1 - s) * var_x

    return _assemble(eta_max, cov)


def _hat_covariances_distinct(model: BidirDistinctEigen):
    """Covariance functions of the decoupled (hat) coordinates, k >= 0."""
    lam_p, lam_m = model.eigenvalues
    su2, sv2 = model.sigma_u**2, model.sigma_v**2
    qb = su2 / (4.0 * model.b)
    qc = sv2 / (4.0 * model.c)
    cross_denom = 1.0 + model.b * model.c - model.a * model.a

    def hxx(k):
        return lam_p**k / (1.0 - lam_p**2) * (qb + qc)

    def hyy(k):
        return lam_m**k / (1.0 - lam_m**2) * (qb + qc)

    def hyx(k):
        return lam_m**k / cross_denom * (-qb + qc)

    def hxy(k):
        return lam_p**k / cross_denom * (-qb + qc)

    return hxx, hyy, hyx, hxy


def _hat_covariances_jordan(model: BidirJordan):
    lam = model.lam
    alpha, beta = model.a / model.b, -1.0
    gamma = model.b / (model.a**2 + model.b**2)
    delta = model.a / (model.a**2 + model.b**2)
    su2, sv2 = model.sigma_u**2, model.sigma_v**2
    one = 1.0 - lam * lam
    psi = (alpha * alpha * su2 + beta * beta * sv2) / one
    phi = lam * psi / one + (alpha * gamma * su2 + delta * beta * sv2) / one
    theta = 2.0 * lam * phi / one + psi / one + (gamma * gamma * su2 + delta * delta * sv2) / one

    def hxx(k):
        return lam**k * psi

    def hyy(k):
        return lam**k * theta + (k * lam ** (k - 1) * phi if k > 0 else 0.0)

    def hyx(k):
        return lam**k * phi + (k * lam ** (k - 1) * psi if k > 0 else 0.0)

    def hxy(k):
        return lam**k * phi

    return hxx, hyy, hyx, hxy


def bidir_hat_covariances(model, k: int):
    """Hat-coordinate covariances at lag k >= 0: (xx, yy, yx, xy)."""
    if k < 0:
        raise InvalidParams(f"k must be >= 0, got {k}")
    if isinstance(model, BidirDistinctEigen):
        hxx, hyy, hyx, hxy = _hat_covariances_distinct(model)
    elif isinstance(model, BidirJordan):
        hxx, hyy, hyx, hxy = _hat_covariances_jordan(model)
    else:
        raise InvalidKind(f"not a bidirectional model: {type(model).__name__}")
    return hxx(k), hyy(k), hyx(k), hxy(k)


def _transform_coefficients(model):
    if isinstance(model, BidirDistinctEigen):
        rb = 2.0 * math.sqrt(model.b)
        rc = 2.0 * math.sqrt(model.c)
        alpha, beta = 1.0 / rb, model.s / rc
        gamma, delta = -1.0 / rb, model.s / rc
    else:
        alpha, beta = model.a / model.b, -1.0
        gamma = model.b / (model.a**2 + model.b**2)
        delta = model.a / (model.a**2 + model.b**2)
    return alpha, beta, gamma, delta


def bidir_covariance(model, eta_max: int) -> LagCovariance:
    """Exact stationary lag covariances of a two-way pair.

    Hat-coordinate covariances are propagated analytically and mapped back to
    the original variables with the inverse spectral transform.
    """
    if isinstance(model, BidirDistinctEigen):
        hxx, hyy, hyx, hxy = _hat_covariances_distinct(model)
    elif isinstance(model, BidirJordan):
        hxx, hyy, hyx, hxy = _hat_covariances_jordan(model)
    else:
        raise InvalidKind(f"not a bidirectional model: {type(model).__name__}")
    alpha, beta, gamma, delta = _transform_coefficients(model)
    D = (alpha * delta - beta * gamma) ** 2

    def orig_xx(k):
        return (
            delta * delta * hxx(k)
            + beta * beta * hyy(k)
            - delta * beta * (hxy(k) + hyx(k))
        ) / D

    def orig_yy(k):
        return (
            alpha * alpha * hyy(k)
            + gamma * gamma * hxx(k)
            - alpha * gamma * (hxy(k) + hyx(k))
        ) / D

    def orig_yx(k):  # cov(y_{t+k}, x_t)
        return (
            alpha * delta * hyx(k)
            + gamma * beta * hxy(k)
            - alpha * beta * hyy(k)
            - gamma * delta * hxx(k)
        ) / D

    def orig_xy(k):  # cov(x_{t+k}, y_t)
        return (
            alpha * delta * hxy(k)
            + gamma * beta * hyx(k)
            - alpha * beta * hyy(k)
            - gamma * delta * hxx(k)
        ) / D

    def cov(vi, s, vj, u):
        if s >= u:
            lead, k = (vi, vj), s - u
        else:
            lead, k = (vj, vi), u - s
        if lead == ("x", "x"):
            return orig_xx(k)
        if lead == ("y", "y"):
            return orig_yy(k)
        if lead == ("y", "x"):
            return orig_yx(k)
        return orig_xy(k)

    return _assemble(eta_max, cov)


def gaussian_entropy(cov) -> float:
    """Differential entropy (bits) of a zero-mean Gaussian with covariance cov."""
    M = np.atleast_2d(np.asarray(cov, dtype=np.float64))
    d = M.shape[0]
    if M.shape != (d, d):
        raise InvalidParams(f"covariance must be square, got shape {M.shape}")
    diag = np.diag(M)
    if np.any(diag <= 0):
        raise SingularCovariance("nonpositive variance on the diagonal")
    sign, logabsdet = np.linalg.slogdet(M)
    # Relative singularity gate: det <= 1e-12 * (geometric mean of diag)^d.
    log_tol = math.log(1e-12) + float(np.sum(np.log(diag)))
    if sign <= 0 or logabsdet <= log_tol:
        raise SingularCovariance("covariance is numerically singular")
    return 0.5 * (d * _LOG2_2PIE + logabsdet / math.log(2.0))


def exact_cmi(cov: LagCovariance, source_idx, future_idx, history_idx) -> float:
    """I(future; source | history) in bits from the stacked covariance.

    The three index sets must be disjoint row indices of `cov.matrix`.
    """
    s, f, h = list(source_idx), list(future_idx), list(history_idx)
    if not s or not f:
        raise InvalidParams("source and future index sets must be nonempty")
    pool = s + f + h
    if len(set(pool)) != len(pool):
        raise InvalidParams("index sets must be disjoint")
    h_sh = gaussian_entropy(cov.submatrix(s + h)) if h else gaussian_entropy(cov.submatrix(s))
    h_fh = gaussian_entropy(cov.submatrix(f + h)) if h else gaussian_entropy(cov.submatrix(f))
    h_all = gaussian_entropy(cov.submatrix(s + f + h))
    if h:
        return h_sh + h_fh - gaussian_entropy(cov.submatrix(h)) - h_all
    return h_sh + h_fh - h_all


def model_covariance(model, eta_max: int) -> LagCovariance:
    if isinstance(model, UnidirAR1):
        return ar1_unidir_covariance(model, eta_max)
    return bidir_covariance(model, eta_max)


def _direction_vars(direction):
    if direction == "xy":
        return "x", "y"
    if direction == "yx":
        return "y", "x"
    raise InvalidParams(f"direction must be 'xy' or 'yx', got {direction!r}")


def exact_te(model, nu: int, direction="xy", cov: LagCovariance = None) -> float:
    """Exact TE (bits) at signed lag nu with singleton histories."""
    if nu == 0:
        raise InvalidParams("nu must be nonzero")
    if cov is None:
        cov = model_covariance(model, abs(nu))
    src, tgt = _direction_vars(direction)
    return exact_cmi(
        cov,
        source_idx=[cov.index(src, 0)],
        future_idx=[cov.index(tgt, nu)],
        history_idx=[cov.index(tgt, 0)],
    )


def exact_spectrum(model, eta_max: int, direction="xy") -> TESpectrum:
    """Exact TE at every signed lag, as a regular spectrum object."""
    cov = model_covariance(model, eta_max)
    lags = [v for v in range(-eta_max, eta_max + 1) if v != 0]
    values = [exact_te(model, v, direction=direction, cov=cov) for v in lags]
    return TESpectrum(
        lags=np.array(lags),
        values=np.array(values),
        estimator_id="exact-gaussian",
        params={"model": type(model).__name__, "direction": direction},
    )


def exact_asymmetry(model, eta_max: int, f: float = 1.0) -> dict:
    """Exact asymmetry curves for both directions: {"xy": ..., "yx": ...}."""
    return {
        d: asymmetry_curve(exact_spectrum(model, eta_max, direction=d), f=f)
        for d in ("xy", "yx")
    }
