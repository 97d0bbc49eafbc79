"""Seeded generators for the synthetic benchmark systems.

Fifteen families: coupled logistic maps, a common-driver triple, vector
autoregressions, three pure-noise processes, five unidirectional chains
(autoregressive-periodic, three nonlinear variants, logistic), a Henon chain,
a continuously integrated Rossler-Lorenz pair, a bidirectional nonlinear
system, and a noise-free nonlinear 2-D map.

A SystemSpec pins family, parameters, length, transient and seed; generate()
is a pure function of the spec, so identical specs give identical output.
Dynamical noise is drawn fresh at every step inside each recursion.
Observational noise is never applied here; use series.add_observational_noise
with observational_noise_default(family) for the benchmark protocols.

Parameter randomization (random_system) draws from the documented ranges per
family; chain-family couplings are drawn per link. Stability of var_k
coefficient sets is checked at construction time.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import Diverged, InvalidKind, InvalidParams, RejectionLimit
from .rng import Seed, make_rng
from .series import MultiSeries, TimeSeries

FAMILIES = (
    "logistic_bidir",
    "common_cause",
    "var_k",
    "noise_uniform",
    "noise_normal",
    "noise_brownian",
    "ar_periodic_nl",
    "chen_linear",
    "chen_nonlinear",
    "chen_periodic",
    "logistic_chain",
    "henon_chain",
    "rossler_lorenz",
    "bidir_nl_periodic",
    "nl2d",
)

# State magnitude above which a map iteration counts as divergent. Generously
# above every attractor here, small enough that squaring cannot overflow.
_BLOWUP = 1e12

_TWO_PI = 2.0 * math.pi


def _plain(obj):
    """Normalize params to JSON-clean builtins (int, float, str, list)."""
    if isinstance(obj, bool):
        raise InvalidParams("boolean parameters are not supported")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    raise InvalidParams(f"unsupported parameter value {obj!r}")


def _floats(params, key, n=None, minimum=None):
    v = params[key]
    if not isinstance(v, list):
        raise InvalidParams(f"{key} must be a list of numbers")
    if n is not None and len(v) != n:
        raise InvalidParams(f"{key} must have length {n}, got {len(v)}")
    out = []
    for e in v:
        if not isinstance(e, (int, float)) or not math.isfinite(e):
            raise InvalidParams(f"{key} entries must be finite numbers")
        out.append(float(e))
    if minimum is not None and any(e < minimum for e in out):
        raise InvalidParams(f"{key} entries must be >= {minimum}")
    return out


def _ints(params, key, n=None, minimum=1):
    v = params[key]
    if not isinstance(v, list):
        raise InvalidParams(f"{key} must be a list of integers")
    if n is not None and len(v) != n:
        raise InvalidParams(f"{key} must have length {n}, got {len(v)}")
    for e in v:
        if not isinstance(e, int) or e < minimum:
            raise InvalidParams(f"{key} entries must be integers >= {minimum}")
    return list(v)


def _scalar(params, key, minimum=None, strict=False):
    v = params[key]
    if not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidParams(f"{key} must be a finite number, got {v!r}")
    v = float(v)
    if minimum is not None and (v <= minimum if strict else v < minimum):
        op = ">" if strict else ">="
        raise InvalidParams(f"{key} must be {op} {minimum}, got {v}")
    return v


def _int_scalar(params, key, minimum=1):
    v = params[key]
    if not isinstance(v, int) or v < minimum:
        raise InvalidParams(f"{key} must be an integer >= {minimum}, got {v!r}")
    return v


_REQUIRED = {
    "logistic_bidir": ("r1", "r2", "c_xy", "c_yx", "sigma_xy", "sigma_yx"),
    "common_cause": ("alpha", "beta", "amp", "omega", "phi", "sigma", "c31", "c32", "gamma", "nu"),
    "var_k": ("coeffs", "sigma"),
    "noise_uniform": (),
    "noise_normal": ("sigma_x", "sigma_y"),
    "noise_brownian": (),
    "ar_periodic_nl": ("alpha", "beta", "sigma", "s", "omega", "phi", "gamma", "c", "chi", "rho", "q", "tau", "nu"),
    "chen_linear": ("alpha", "beta", "sigma", "gamma", "tau", "c", "nu"),
    "chen_nonlinear": ("alpha", "beta", "sigma", "gamma", "tau", "c", "nu"),
    "chen_periodic": ("alpha", "beta", "sigma", "gamma", "tau", "c", "nu", "omega", "phi"),
    "logistic_chain": ("r", "c", "sigma", "gamma", "tau"),
    "henon_chain": ("a", "b", "c"),
    "rossler_lorenz": ("a1", "a2", "a3", "b1", "b2", "b3", "c_xy", "dt", "sample_every"),
    "bidir_nl_periodic": ("alpha", "beta", "omega", "phi", "sigma", "c12", "c21", "gamma", "tau", "nu"),
    "nl2d": ("a1", "a2", "b1", "b2", "c_xy", "tau_x1", "tau_x2", "tau_y1", "tau_y2", "tau_c"),
}

# Discrete families accept an optional "init": one value per variable used to
# fill the whole startup margin (otherwise initial conditions ~ U(0,1)).
_INIT_OK = frozenset(FAMILIES) - {"noise_uniform", "noise_normal", "noise_brownian", "rossler_lorenz"}


def _chain_length(params, per_var_key):
    v = params.get(per_var_key)
    if not isinstance(v, list) or not v:
        raise InvalidParams(f"{per_var_key} must be a nonempty list")
    return len(v)


def _validate_params(family, params):
    required = set(_REQUIRED[family])
    present = set(params)
    missing = sorted(required - present)
    if missing:
        raise InvalidParams(f"{family}: missing parameter(s) {missing}")
    allowed = required | ({"init"} if family in _INIT_OK else set())
    unknown = sorted(present - allowed)
    if unknown:
        raise InvalidParams(f"{family}: unknown parameter(s) {unknown}")

    if family == "logistic_bidir":
        for key in ("r1", "r2"):
            _scalar(params, key)
        for key in ("c_xy", "c_yx", "sigma_xy", "sigma_yx"):
            _scalar(params, key, minimum=0.0)
    elif family == "common_cause":
        _floats(params, "alpha", n=3)
        _floats(params, "beta", n=2)
        _floats(params, "amp", n=3)
        _floats(params, "omega", n=3, minimum=1e-9)
        _floats(params, "phi", n=3)
        _floats(params, "sigma", n=3, minimum=0.0)
        _scalar(params, "c31")
        _scalar(params, "c32")
        _ints(params, "gamma", n=3)
        _int_scalar(params, "nu")
    elif family == "var_k":
        coeffs = params["coeffs"]
        if not isinstance(coeffs, list) or not coeffs:
            raise InvalidParams("coeffs must be a nonempty list of square matrices")
        mats = [np.asarray(m, dtype=np.float64) for m in coeffs]
        p = mats[0].shape[0] if mats[0].ndim == 2 else -1
        for m in mats:
            if m.ndim != 2 or m.shape != (p, p):
                raise InvalidParams("coeffs must all be square matrices of one size")
            if not np.all(np.isfinite(m)):
                raise InvalidParams("coeffs contain non-finite entries")
        sigma = params["sigma"]
        if isinstance(sigma, list):
            _floats(params, "sigma", n=p, minimum=0.0)
        else:
            _scalar(params, "sigma", minimum=0.0)
        if not var_is_stable(mats):
            radius = _spectral_radius(mats)
            raise InvalidParams(
                f"var_k coefficients are unstable: spectral radius {radius:.6f} >= 1"
            )
    elif family == "noise_normal":
        _scalar(params, "sigma_x", minimum=0.0, strict=True)
        _scalar(params, "sigma_y", minimum=0.0, strict=True)
    elif family in ("noise_uniform", "noise_brownian"):
        pass
    elif family == "ar_periodic_nl":
        K = _chain_length(params, "alpha")
        for key in ("alpha", "beta", "s", "chi", "rho", "q"):
            _floats(params, key, n=K)
        _floats(params, "sigma", n=K, minimum=0.0)
        _floats(params, "omega", n=K, minimum=1e-9)
        _floats(params, "phi", n=K)
        _floats(params, "c", n=K)
        _ints(params, "gamma", n=K)
        tau = _ints(params, "tau", n=K)
        nu = _ints(params, "nu", n=K)
        for i in range(1, K):
            if tau[i] == nu[i]:
                raise InvalidParams(f"tau[{i}] and nu[{i}] must differ, both are {tau[i]}")
    elif family in ("chen_linear", "chen_nonlinear", "chen_periodic"):
        K = _chain_length(params, "alpha")
        _floats(params, "alpha", n=K)
        _floats(params, "beta", n=K)
        _floats(params, "sigma", n=K, minimum=0.0)
        _floats(params, "c", n=K)
        _ints(params, "gamma", n=K)
        _ints(params, "tau", n=K)
        _ints(params, "nu", n=K)
        if family == "chen_periodic":
            _floats(params, "omega", n=K, minimum=1e-9)
            _floats(params, "phi", n=K)
    elif family == "logistic_chain":
        K = _chain_length(params, "r")
        _floats(params, "r", n=K)
        _floats(params, "c", n=K, minimum=0.0)
        _scalar(params, "sigma", minimum=0.0)
        _ints(params, "gamma", n=K)
        _ints(params, "tau", n=K)
    elif family == "henon_chain":
        _scalar(params, "a")
        _scalar(params, "b")
        _floats(params, "c", minimum=0.0)
        if not params["c"]:
            raise InvalidParams("c must be a nonempty list (one entry per map)")
    elif family == "rossler_lorenz":
        for key in ("a1", "a2", "a3", "b1", "b2", "b3"):
            _scalar(params, key)
        _scalar(params, "c_xy", minimum=0.0)
        _scalar(params, "dt", minimum=0.0, strict=True)
        _int_scalar(params, "sample_every")
    elif family == "bidir_nl_periodic":
        _floats(params, "alpha", n=2)
        _floats(params, "beta", n=2)
        _floats(params, "omega", n=2, minimum=1e-9)
        _floats(params, "phi", n=2)
        _floats(params, "sigma", n=2, minimum=0.0)
        _scalar(params, "c12")
        _scalar(params, "c21")
        _ints(params, "gamma", n=2)
        _ints(params, "tau", n=2)
        _ints(params, "nu", n=2)
    elif family == "nl2d":
        for key in ("a1", "a2", "b1", "b2", "c_xy"):
            _scalar(params, key)
        for key in ("tau_x1", "tau_x2", "tau_y1", "tau_y2", "tau_c"):
            _int_scalar(params, key)

    if "init" in params:
        init = params["init"]
        n = n_variables(family, params)
        if not isinstance(init, list) or len(init) != n:
            raise InvalidParams(f"init must list one value per variable ({n})")
        for e in init:
            if not isinstance(e, (int, float)) or not math.isfinite(e):
                raise InvalidParams("init entries must be finite numbers")


@dataclass(frozen=True)
class SystemSpec:
    """A fully pinned synthetic system: family, parameters, length, seed.

    Specs serialize to JSON (to_json/from_json) for exact experiment replay.
    """

    family: str
    params: dict
    N: int
    transient: int
    seed: Seed

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidKind(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool) or self.N < 1:
            raise InvalidParams(f"N must be an integer >= 1, got {self.N!r}")
        if (
            not isinstance(self.transient, (int, np.integer))
            or isinstance(self.transient, bool)
            or self.transient < 0
        ):
            raise InvalidParams(f"transient must be an integer >= 0, got {self.transient!r}")
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise InvalidParams(f"seed must be an integer, got {self.seed!r}")
        if not isinstance(self.params, dict):
            raise InvalidParams("params must be a dict")
        params = _plain(self.params)
        _validate_params(self.family, params)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "transient", int(self.transient))
        object.__setattr__(self, "seed", int(self.seed))

    def to_json(self) -> str:
        return json.dumps(
            {
                "family": self.family,
                "params": self.params,
                "N": self.N,
                "transient": self.transient,
                "seed": self.seed,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SystemSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParams(f"not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise InvalidParams("spec JSON must be an object")
        try:
            return cls(
                family=doc["family"],
                params=doc["params"],
                N=doc["N"],
                transient=doc["transient"],
                seed=doc["seed"],
            )
        except KeyError as exc:
            raise InvalidParams(f"spec JSON missing key {exc}") from exc


_DEFAULTS = {
    "logistic_bidir": {
        "r1": 3.88, "r2": 3.87, "c_xy": 0.5, "c_yx": 0.0,
        "sigma_xy": 0.05, "sigma_yx": 0.05,
    },
    "common_cause": {
        "alpha": [3.25, 3.25, 3.25], "beta": [0.5, 0.5], "amp": [1.0, 1.0, 1.0],
        "omega": [41.0, 67.0, 83.0], "phi": [0.0, 1.0, 2.0],
        "sigma": [0.15, 0.15, 0.15], "c31": 0.5, "c32": 0.5,
        "gamma": [1, 2, 3], "nu": 1,
    },
    "var_k": {
        "coeffs": [[[0.5, 0.0], [0.4, 0.5]]], "sigma": [1.0, 1.0],
    },
    "noise_uniform": {},
    "noise_normal": {"sigma_x": 1.0, "sigma_y": 1.0},
    "noise_brownian": {},
    "ar_periodic_nl": {
        "alpha": [0.3, 0.3], "beta": [0.5, 0.5], "sigma": [0.2, 0.2],
        "s": [1.0, 1.0], "omega": [12.0, 17.0], "phi": [0.0, 1.5],
        "gamma": [1, 2], "c": [0.0, 0.8], "chi": [0.0, 1.0], "rho": [0.0, 1.0],
        "q": [0.0, 6.0], "tau": [1, 2], "nu": [1, 3],
    },
    "chen_linear": {
        "alpha": [3.25, 3.25], "beta": [0.5, 0.5], "sigma": [0.2, 0.2],
        "gamma": [1, 2], "tau": [2, 3], "c": [0.0, 0.8], "nu": [1, 1],
    },
    "chen_nonlinear": {
        "alpha": [3.25, 3.25], "beta": [0.5, 0.5], "sigma": [0.2, 0.2],
        "gamma": [1, 2], "tau": [2, 3], "c": [0.0, 0.8], "nu": [1, 1],
    },
    "chen_periodic": {
        "alpha": [3.25, 3.25], "beta": [0.5, 0.5], "sigma": [0.2, 0.2],
        "gamma": [1, 2], "tau": [2, 3], "c": [0.0, 0.8], "nu": [1, 1],
        "omega": [12.0, 17.0], "phi": [0.0, 1.5],
    },
    "logistic_chain": {
        "r": [3.88, 3.87], "c": [0.0, 0.5], "sigma": 0.05,
        "gamma": [1, 2], "tau": [1, 1],
    },
    "henon_chain": {"a": 1.4, "b": 0.3, "c": [0.0, 0.5]},
    "rossler_lorenz": {
        "a1": -6.0, "a2": 6.0, "a3": 5.7, "b1": 10.0, "b2": 28.0,
        "b3": 8.0 / 3.0, "c_xy": 1.2, "dt": 0.01, "sample_every": 30,
    },
    "bidir_nl_periodic": {
        "alpha": [3.3, 3.3], "beta": [0.5, 0.5], "omega": [10.0, 15.0],
        "phi": [0.0, 1.0], "sigma": [0.5, 0.5], "c12": 0.8, "c21": 0.8,
        "gamma": [1, 2], "tau": [1, 1], "nu": [1, 1],
    },
    "nl2d": {
        "a1": 3.4, "a2": 0.8, "b1": 3.4, "b2": 0.8, "c_xy": 0.8,
        "tau_x1": 1, "tau_x2": 7, "tau_y1": 5, "tau_y2": 5, "tau_c": 5,
    },
}


def default_params(family) -> dict:
    """A literal, working parameter set for `family` (used by the CLI)."""
    if family not in FAMILIES:
        raise InvalidKind(f"unknown family {family!r}; choose from {FAMILIES}")
    return json.loads(json.dumps(_DEFAULTS[family]))


def default_transient(family) -> int:
    """Burn-in discards: 1000 steps for maps, 334 samples for the ODE pair.

    334 samples x stride 30 x dt 0.01 is just over 100 time units.
    """
    if family not in FAMILIES:
        raise InvalidKind(f"unknown family {family!r}; choose from {FAMILIES}")
    return 334 if family == "rossler_lorenz" else 1000


def make_spec(family, N, seed, transient=None, **overrides) -> SystemSpec:
    """Build a SystemSpec from family defaults plus keyword overrides."""
    params = default_params(family)
    for key, value in overrides.items():
        params[key] = value
    if transient is None:
        transient = default_transient(family)
    return SystemSpec(family=family, params=params, N=N, transient=transient, seed=seed)


def n_variables(family, params) -> int:
    if family in ("logistic_bidir", "noise_uniform", "noise_normal", "noise_brownian", "nl2d"):
        return 2
    if family == "common_cause":
        return 3
    if family == "var_k":
        return len(params["coeffs"][0])
    if family in ("ar_periodic_nl", "chen_linear", "chen_nonlinear", "chen_periodic"):
        return len(params["alpha"])
    if family == "logistic_chain":
        return len(params["r"])
    if family == "henon_chain":
        return len(params["c"])
    if family in ("rossler_lorenz", "bidir_nl_periodic"):
        return 2
    raise InvalidKind(f"unknown family {family!r}")


def labels_for(family, params) -> tuple:
    if family in ("logistic_bidir", "noise_uniform", "noise_normal", "noise_brownian", "nl2d"):
        return ("x", "y")
    if family == "rossler_lorenz":
        return ("x2", "y2")
    return tuple(f"x{i + 1}" for i in range(n_variables(family, params)))


def _spectral_radius(mats) -> float:
    k = len(mats)
    p = mats[0].shape[0]
    companion = np.zeros((k * p, k * p))
    for m, A in enumerate(mats):
        companion[:p, m * p:(m + 1) * p] = A
    if k > 1:
        companion[p:, :-p] = np.eye((k - 1) * p)
    return float(np.max(np.abs(np.linalg.eigvals(companion))))


def var_is_stable(coeff_matrices) -> bool:
    """True iff the stacked companion matrix has all eigenvalues inside the unit circle."""
    mats = [np.asarray(m, dtype=np.float64) for m in coeff_matrices]
    if not mats:
        raise InvalidParams("need at least one coefficient matrix")
    p = mats[0].shape[0] if mats[0].ndim == 2 else -1
    for m in mats:
        if m.ndim != 2 or m.shape != (p, p):
            raise InvalidParams("coefficient matrices must be square and equally sized")
    return _spectral_radius(mats) < 1.0


def _nonlinear_core(u):
    # u(1-u^2)exp(-u^2): bounded hump, |value| < 0.3 for all real u
    return u * (1.0 - u * u) * math.exp(-min(u * u, 745.0))


def _sigmoid(z):
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _guard(values, family, t):
    for v in values:
        if not math.isfinite(v) or abs(v) > _BLOWUP:
            raise Diverged(f"{family} state diverged at step {t}")


def _iterate_map(spec, rng, margin, step):
    """Shared recursion driver: margin rows of initial conditions, then steps."""
    nvar = n_variables(spec.family, spec.params)
    total = spec.transient + spec.N
    buf = np.empty((margin + total, nvar))
    init = spec.params.get("init")
    if init is not None:
        buf[:margin] = np.asarray(init, dtype=np.float64)
    else:
        buf[:margin] = rng.uniform(size=(margin, nvar))
    for t in range(margin, margin + total):
        row = step(buf, t, rng)
        _guard(row, spec.family, t - margin)
        buf[t] = row
    return buf[margin + spec.transient:]


def _gen_logistic_bidir(spec, rng):
    p = spec.params
    r1, r2 = p["r1"], p["r2"]
    cxy, cyx = p["c_xy"], p["c_yx"]
    sxy, syx = p["sigma_xy"], p["sigma_yx"]
    den_xy = 1.0 + cxy * (1.0 + sxy)
    den_yx = 1.0 + cyx * (1.0 + syx)

    def step(buf, t, rng):
        x, y = buf[t - 1]
        noise_xy = rng.uniform()
        noise_yx = rng.uniform()
        f_xy = (y + cxy * (x + sxy * noise_xy)) / den_xy
        f_yx = (x + cyx * (y + syx * noise_yx)) / den_yx
        return (r1 * f_yx * (1.0 - f_yx), r2 * f_xy * (1.0 - f_xy))

    return _iterate_map(spec, rng, 1, step)


def _gen_common_cause(spec, rng):
    p = spec.params
    alpha, beta, amp = p["alpha"], p["beta"], p["amp"]
    omega, phi, sigma = p["omega"], p["phi"], p["sigma"]
    c31, c32, gamma, nu = p["c31"], p["c32"], p["gamma"], p["nu"]
    margin = max(max(gamma), nu)

    def step(buf, t, rng):
        noise = rng.uniform(size=3)
        drive = buf[t - nu, 2]
        forced = drive * drive
        row = []
        for i, c in ((0, c31), (1, c32)):
            own = buf[t - gamma[i], i]
            val = (
                alpha[i] * _nonlinear_core(own)
                + amp[i] * math.cos(_TWO_PI * t / omega[i] + phi[i])
                + c * (forced + beta[i] * drive * _sigmoid(drive))
                + sigma[i] * noise[i]
            )
            row.append(val)
        own = buf[t - gamma[2], 2]
        row.append(
            alpha[2] * _nonlinear_core(own)
            + amp[2] * math.cos(_TWO_PI * t / omega[2] + phi[2])
            + sigma[2] * noise[2]
        )
        return row

    return _iterate_map(spec, rng, margin, step)


def _gen_var_k(spec, rng):
    p = spec.params
    mats = [np.asarray(m, dtype=np.float64) for m in p["coeffs"]]
    k = len(mats)
    nvar = mats[0].shape[0]
    sigma = p["sigma"]
    sds = np.full(nvar, float(sigma)) if not isinstance(sigma, list) else np.asarray(sigma)

    def step(buf, t, rng):
        acc = rng.normal(0.0, sds)
        for m, A in enumerate(mats, start=1):
            acc = acc + A @ buf[t - m]
        return acc

    return _iterate_map(spec, rng, k, step)


def _gen_noise(spec, rng):
    total = spec.transient + spec.N
    if spec.family == "noise_normal":
        data = np.column_stack(
            [
                rng.normal(0.0, spec.params["sigma_x"], size=total),
                rng.normal(0.0, spec.params["sigma_y"], size=total),
            ]
        )
    else:
        data = rng.uniform(0.0, 1.0, size=(total, 2))
        if spec.family == "noise_brownian":
            data = np.cumsum(data, axis=0)
    return data[spec.transient:]


def _gen_ar_periodic_nl(spec, rng):
    p = spec.params
    K = len(p["alpha"])
    alpha, beta, sigma, s = p["alpha"], p["beta"], p["sigma"], p["s"]
    omega, phi, gamma = p["omega"], p["phi"], p["gamma"]
    c, chi, rho, q, tau, nu = p["c"], p["chi"], p["rho"], p["q"], p["tau"], p["nu"]
    margin = max(gamma + tau[1:] + nu[1:])

    def step(buf, t, rng):
        noise = rng.normal(size=K)
        row = []
        for i in range(K):
            val = (
                alpha[i]
                + beta[i] * buf[t - gamma[i], i]
                + sigma[i] * noise[i]
                + s[i] * math.cos(_TWO_PI * t / omega[i] + phi[i])
            )
            if i > 0:
                prev_tau = buf[t - tau[i], i - 1]
                prev_nu = buf[t - nu[i], i - 1]
                val += c[i] * (chi[i] - rho[i] * prev_tau) * _sigmoid(q[i] * prev_nu)
            row.append(val)
        return row

    return _iterate_map(spec, rng, margin, step)


def _gen_chen(spec, rng):
    p = spec.params
    K = len(p["alpha"])
    alpha, beta, sigma = p["alpha"], p["beta"], p["sigma"]
    gamma, tau, c, nu = p["gamma"], p["tau"], p["c"], p["nu"]
    periodic = spec.family == "chen_periodic"
    squared = spec.family == "chen_nonlinear"
    omega = p.get("omega")
    phi = p.get("phi")
    margin = max(gamma + tau + nu[1:])

    def step(buf, t, rng):
        noise = rng.normal(size=K)
        row = []
        for i in range(K):
            val = (
                alpha[i] * _nonlinear_core(buf[t - gamma[i], i])
                + beta[i] * buf[t - tau[i], i]
                + sigma[i] * noise[i]
            )
            if periodic:
                val += math.cos(_TWO_PI * t / omega[i] + phi[i])
            if i > 0:
                prev = buf[t - nu[i], i - 1]
                val += c[i] * (prev * prev if squared else prev)
            row.append(val)
        return row

    return _iterate_map(spec, rng, margin, step)


def _gen_logistic_chain(spec, rng):
    p = spec.params
    K = len(p["r"])
    r, c, sigma, gamma, tau = p["r"], p["c"], p["sigma"], p["gamma"], p["tau"]
    margin = max(gamma + tau[1:])

    def step(buf, t, rng):
        noise = rng.uniform(size=K)
        row = []
        for i in range(K):
            own = buf[t - gamma[i], i]
            if i == 0:
                f = own
            else:
                prev = buf[t - tau[i], i - 1]
                f = (own + c[i] * (prev + sigma * noise[i])) / (1.0 + c[i] * (1.0 + sigma))
            row.append(r[i] * f * (1.0 - f))
        return row

    return _iterate_map(spec, rng, margin, step)


def _gen_henon_chain(spec, rng):
    p = spec.params
    a, b, c = p["a"], p["b"], p["c"]
    K = len(c)

    def step(buf, t, rng):
        row = []
        for i in range(K):
            own = buf[t - 1, i]
            if i == 0:
                drive = own
            else:
                drive = 0.5 * c[i] * (buf[t - 1, i - 1] + own) + (1.0 - c[i]) * own
            row.append(a - drive * drive + b * buf[t - 2, i])
        return row

    return _iterate_map(spec, rng, 2, step)


def _gen_bidir_nl_periodic(spec, rng):
    p = spec.params
    alpha, beta = p["alpha"], p["beta"]
    omega, phi, sigma = p["omega"], p["phi"], p["sigma"]
    c12, c21 = p["c12"], p["c21"]
    gamma, tau, nu = p["gamma"], p["tau"], p["nu"]
    margin = max(gamma + tau + nu)
    couplings = (c21, c12)  # entry i: strength of the other variable's push on i

    def step(buf, t, rng):
        noise = rng.uniform(size=2)
        row = []
        for i in range(2):
            other = buf[t - nu[i], 1 - i]
            own_cos = buf[t - tau[i], i]
            val = (
                alpha[i] * _nonlinear_core(buf[t - gamma[i], i])
                + beta[i] * buf[t - tau[i], i]
                + couplings[i] * math.sin(other)
                + sigma[i] * noise[i]
                + math.cos(_TWO_PI * t / omega[i] + phi[i]) * own_cos
            )
            row.append(val)
        return row

    return _iterate_map(spec, rng, margin, step)


def _gen_nl2d(spec, rng):
    p = spec.params
    a1, a2, b1, b2, cxy = p["a1"], p["a2"], p["b1"], p["b2"], p["c_xy"]
    # recursions define the value one step ahead, so each stated lag acts at +1
    tx1, tx2 = p["tau_x1"] + 1, p["tau_x2"] + 1
    ty1, ty2, tc = p["tau_y1"] + 1, p["tau_y2"] + 1, p["tau_c"] + 1
    margin = max(tx1, tx2, ty1, ty2, tc)

    def step(buf, t, rng):
        x1, x2 = buf[t - tx1, 0], buf[t - tx2, 0]
        y1, y2 = buf[t - ty1, 1], buf[t - ty2, 1]
        xc = buf[t - tc, 0]
        x_new = a1 * x1 * (1.0 - x1 * x1) * math.exp(-min(x1 * x1, 745.0)) + a2 * x2
        y_new = (
            b1 * y1 * (1.0 - y1 * y1) * math.exp(-min(y2 * y2, 745.0))
            + b2 * y2
            + cxy * xc * xc
        )
        return (x_new, y_new)

    return _iterate_map(spec, rng, margin, step)


def integrate_ode(spec: SystemSpec, dt=None, sample_every=None) -> MultiSeries:
    """Fixed-step 4th-order integration of the driven chaotic ODE pair.

    Initial conditions are drawn once from U(0,1) per coordinate under the
    spec's seed, so halving dt (and doubling sample_every) integrates the
    same trajectory more finely. Exposes the observed pair (x2, y2).
    """
    if spec.family != "rossler_lorenz":
        raise InvalidKind(f"ODE integration only applies to rossler_lorenz, got {spec.family}")
    p = spec.params
    if dt is None:
        dt = p["dt"]
    if sample_every is None:
        sample_every = p["sample_every"]
    if not (isinstance(dt, (int, float)) and math.isfinite(dt) and dt > 0):
        raise InvalidParams(f"dt must be a positive number, got {dt!r}")
    if not isinstance(sample_every, int) or sample_every < 1:
        raise InvalidParams(f"sample_every must be an integer >= 1, got {sample_every!r}")
    a1, a2, a3 = p["a1"], p["a2"], p["a3"]
    b1, b2, b3 = p["b1"], p["b2"], p["b3"]
    cxy = p["c_xy"]

    def deriv(u):
        x1, x2, x3, y1, y2, y3 = u
        return np.array(
            [
                a1 * (x2 + x3),
                a2 * (x1 + 0.2 * x2),
                a2 * (0.2 + x3 * (x1 - a3)),
                b1 * (y2 - y1),
                y1 * (b2 - y3) - y2 + cxy * x2 * x2,
                y1 * y2 - b3 * y3,
            ]
        )

    rng = make_rng(spec.seed)
    state = rng.uniform(size=6)
    total = spec.transient + spec.N
    out = np.empty((total, 2))
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(total):
        for _ in range(sample_every):
            k1 = deriv(state)
            k2 = deriv(state + half * k1)
            k3 = deriv(state + half * k2)
            k4 = deriv(state + dt * k3)
            state = state + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > 1e6:
            raise Diverged(f"rossler_lorenz trajectory diverged near sample {i}")
        out[i, 0] = state[1]
        out[i, 1] = state[4]
    data = out[spec.transient:]
    return MultiSeries(
        tuple(
            TimeSeries(data[:, j], dt=dt * sample_every, label=lab)
            for j, lab in enumerate(("x2", "y2"))
        )
    )


_MAP_GENERATORS = {
    "logistic_bidir": _gen_logistic_bidir,
    "common_cause": _gen_common_cause,
    "var_k": _gen_var_k,
    "noise_uniform": _gen_noise,
    "noise_normal": _gen_noise,
    "noise_brownian": _gen_noise,
    "ar_periodic_nl": _gen_ar_periodic_nl,
    "chen_linear": _gen_chen,
    "chen_nonlinear": _gen_chen,
    "chen_periodic": _gen_chen,
    "logistic_chain": _gen_logistic_chain,
    "henon_chain": _gen_henon_chain,
    "bidir_nl_periodic": _gen_bidir_nl_periodic,
    "nl2d": _gen_nl2d,
}


def generate(spec: SystemSpec) -> MultiSeries:
    """Run the spec's recursion; return N observations after the transient.

    Purely a function of the spec. Observational noise is not applied here.
    """
    if spec.family == "rossler_lorenz":
        return integrate_ode(spec)
    rng = make_rng(spec.seed)
    data = _MAP_GENERATORS[spec.family](spec, rng)
    if not np.all(np.isfinite(data)):
        raise Diverged(f"{spec.family} produced non-finite output")
    labels = labels_for(spec.family, spec.params)
    return MultiSeries(
        tuple(TimeSeries(data[:, j], dt=1.0, label=lab) for j, lab in enumerate(labels))
    )


def truth_graph(spec: SystemSpec) -> tuple:
    """Directed ground-truth edges (source label, target label).

    An edge exists iff its coupling coefficient is nonzero. Indirect
    (grandparent) influence along chains is deliberately not an edge; the
    pairwise benchmarks count it as a negative.
    """
    family, p = spec.family, spec.params
    labels = labels_for(family, p)
    edges = []
    if family == "logistic_bidir":
        if p["c_xy"] != 0:
            edges.append(("x", "y"))
        if p["c_yx"] != 0:
            edges.append(("y", "x"))
    elif family == "common_cause":
        if p["c31"] != 0:
            edges.append(("x3", "x1"))
        if p["c32"] != 0:
            edges.append(("x3", "x2"))
    elif family == "var_k":
        mats = [np.asarray(m) for m in p["coeffs"]]
        nvar = mats[0].shape[0]
        for source in range(nvar):
            for target in range(nvar):
                if source == target:
                    continue
                if any(m[target, source] != 0 for m in mats):
                    edges.append((labels[source], labels[target]))
    elif family in ("ar_periodic_nl", "chen_linear", "chen_nonlinear", "chen_periodic",
                    "logistic_chain", "henon_chain"):
        c = p["c"]
        for i in range(1, len(c)):
            if c[i] != 0:
                edges.append((labels[i - 1], labels[i]))
    elif family == "rossler_lorenz":
        if p["c_xy"] != 0:
            edges.append(("x2", "y2"))
    elif family == "bidir_nl_periodic":
        if p["c12"] != 0:
            edges.append(("x1", "x2"))
        if p["c21"] != 0:
            edges.append(("x2", "x1"))
    elif family == "nl2d":
        if p["c_xy"] != 0:
            edges.append(("x", "y"))
    return tuple(edges)


def max_lag(spec: SystemSpec) -> int:
    """Largest internal or interaction delay; drives the prediction-lag extension."""
    family, p = spec.family, spec.params
    if family == "common_cause":
        return max(max(p["gamma"]), p["nu"])
    if family == "var_k":
        return len(p["coeffs"])
    if family == "ar_periodic_nl":
        return max(p["gamma"] + p["tau"][1:] + p["nu"][1:])
    if family in ("chen_linear", "chen_nonlinear", "chen_periodic"):
        return max(p["gamma"] + p["tau"] + p["nu"][1:])
    if family == "logistic_chain":
        return max(p["gamma"] + p["tau"][1:])
    if family == "henon_chain":
        return 2
    if family == "bidir_nl_periodic":
        return max(p["gamma"] + p["tau"] + p["nu"])
    if family == "nl2d":
        return 1 + max(p["tau_x1"], p["tau_x2"], p["tau_y1"], p["tau_y2"], p["tau_c"])
    return 1


def observational_noise_default(family) -> float:
    """Benchmark-protocol observational noise, as a fraction of each series' sd."""
    if family not in FAMILIES:
        raise InvalidKind(f"unknown family {family!r}; choose from {FAMILIES}")
    return {
        "logistic_bidir": 0.0,
        "common_cause": 0.5,
        "var_k": 0.3,
        "noise_uniform": 0.0,
        "noise_normal": 0.0,
        "noise_brownian": 0.0,
        "ar_periodic_nl": 0.2,
        "chen_linear": 0.2,
        "chen_nonlinear": 0.2,
        "chen_periodic": 0.2,
        "logistic_chain": 0.3,
        "henon_chain": 0.2,
        "rossler_lorenz": 0.1,
        "bidir_nl_periodic": 0.5,
        "nl2d": 0.5,
    }[family]


def _draw(rng, coupling):
    if isinstance(coupling, (int, float)) and not isinstance(coupling, bool):
        if not math.isfinite(coupling):
            raise InvalidParams(f"coupling must be finite, got {coupling!r}")
        return float(coupling)
    try:
        lo, hi = coupling
    except (TypeError, ValueError) as exc:
        raise InvalidParams(
            f"coupling must be a number or a (low, high) pair, got {coupling!r}"
        ) from exc
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise InvalidParams(f"coupling range must be finite with low <= high, got {coupling!r}")
    return float(rng.uniform(lo, hi))


_LAG_SET = (1, 2, 3, 4, 5)


def random_system(
    family,
    coupling,
    N,
    master_seed,
    n_vars=None,
    order_set=None,
    coupling_reverse=None,
    transient=None,
) -> SystemSpec:
    """Draw one randomized realization spec for `family`.

    `coupling` is a value or (low, high) range; chain links and the var_k
    cross term draw from it independently. `coupling_reverse` adds the second
    direction for the two bidirectional families. All draws are recorded in
    the returned spec, so the realization replays exactly.

    Ranges marked in the package docs as artifact choices fill gaps where the
    source protocols only say "randomized"; the rest are as documented.
    """
    if family not in FAMILIES:
        raise InvalidKind(f"unknown family {family!r}; choose from {FAMILIES}")
    rng = make_rng(master_seed, 101)
    K = 2 if n_vars is None else int(n_vars)
    if K < 1:
        raise InvalidParams(f"n_vars must be >= 1, got {n_vars!r}")

    def lag():
        return int(rng.choice(_LAG_SET))

    def lags(n, lo=1, hi=5):
        return [int(v) for v in rng.integers(lo, hi + 1, size=n)]

    params = None
    if family == "logistic_bidir":
        c_yx = 0.0 if coupling_reverse is None else _draw(rng, coupling_reverse)
        params = {
            "r1": float(rng.uniform(3.86, 3.9)),
            "r2": float(rng.uniform(3.86, 3.9)),
            "c_xy": _draw(rng, coupling),
            "c_yx": c_yx,
            "sigma_xy": 0.05,
            "sigma_yx": 0.05,
        }
    elif family == "common_cause":
        params = {
            "alpha": [float(v) for v in rng.uniform(2.5, 4.0, size=3)],
            "beta": [float(v) for v in rng.uniform(0.2, 0.8, size=2)],
            "amp": [float(v) for v in rng.uniform(0.75, 1.25, size=3)],
            "omega": [float(v) for v in rng.uniform(20.0, 100.0, size=3)],
            "phi": [float(v) for v in rng.uniform(0.0, _TWO_PI, size=3)],
            "sigma": [float(v) for v in rng.uniform(0.03, 0.3, size=3)],
            "c31": _draw(rng, coupling),
            "c32": _draw(rng, coupling),
            "gamma": lags(3, 1, 4),
            "nu": 1,
        }
    elif family == "var_k":
        orders = tuple(order_set) if order_set is not None else _LAG_SET
        params = _random_var(rng, coupling, K, orders)
    elif family in ("noise_uniform", "noise_normal", "noise_brownian"):
        params = default_params(family)
    elif family == "ar_periodic_nl":
        tau = [1] + lags(K - 1)
        nu = []
        for t in tau[1:]:
            n = lag()
            while n == t:
                n = lag()
            nu.append(n)
        params = {
            "alpha": [float(v) for v in rng.uniform(0.1, 0.5, size=K)],
            "beta": [float(v) for v in rng.uniform(0.2, 0.8, size=K)],
            "sigma": [float(v) for v in rng.uniform(0.1, 0.3, size=K)],
            "s": [float(v) for v in rng.uniform(0.5, 1.5, size=K)],
            "omega": [float(v) for v in rng.uniform(5.0, 20.0, size=K)],
            "phi": [float(v) for v in rng.uniform(0.0, _TWO_PI, size=K)],
            "gamma": lags(K),
            "c": [0.0] + [_draw(rng, coupling) for _ in range(K - 1)],
            "chi": [float(v) for v in rng.uniform(0.8, 1.2, size=K)],
            "rho": [float(v) for v in rng.uniform(0.8, 1.2, size=K)],
            "q": [float(v) for v in rng.uniform(2.0, 10.0, size=K)],
            "tau": tau,
            "nu": [1] + nu,
        }
    elif family in ("chen_linear", "chen_nonlinear", "chen_periodic"):
        params = {
            "alpha": [float(v) for v in rng.uniform(2.5, 4.0, size=K)],
            "beta": [float(v) for v in rng.uniform(0.2, 0.8, size=K)],
            "sigma": [float(v) for v in rng.uniform(0.1, 0.3, size=K)],
            "gamma": lags(K),
            "tau": lags(K),
            "c": [0.0] + [_draw(rng, coupling) for _ in range(K - 1)],
            "nu": [1] + lags(K - 1),
        }
        if family == "chen_periodic":
            params["omega"] = [float(v) for v in rng.uniform(5.0, 20.0, size=K)]
            params["phi"] = [float(v) for v in rng.uniform(0.0, _TWO_PI, size=K)]
    elif family == "logistic_chain":
        params = {
            "r": [float(v) for v in rng.uniform(3.86, 3.9, size=K)],
            "c": [0.0] + [_draw(rng, coupling) for _ in range(K - 1)],
            "sigma": 0.05,
            "gamma": lags(K),
            "tau": [1] + lags(K - 1),
        }
    elif family == "henon_chain":
        params = {
            "a": 1.4,
            "b": 0.3,
            "c": [0.0] + [_draw(rng, coupling) for _ in range(K - 1)],
        }
    elif family == "rossler_lorenz":
        params = default_params(family)
        params["a3"] = float(rng.uniform(5.65, 5.75))
        params["b2"] = float(rng.uniform(27.0, 29.0))
        params["c_xy"] = _draw(rng, coupling)
    elif family == "bidir_nl_periodic":
        back = coupling if coupling_reverse is None else coupling_reverse
        params = {
            "alpha": [float(v) for v in rng.uniform(3.0, 3.6, size=2)],
            "beta": [float(v) for v in rng.uniform(0.2, 0.8, size=2)],
            "omega": [float(v) for v in rng.uniform(5.0, 20.0, size=2)],
            "phi": [float(v) for v in rng.uniform(0.0, _TWO_PI, size=2)],
            "sigma": [0.5, 0.5],
            "c12": _draw(rng, coupling),
            "c21": _draw(rng, back),
            "gamma": lags(2, 1, 2),
            "tau": [1, 1],
            "nu": [1, 1],
        }
    elif family == "nl2d":
        # y's cubic and its Gaussian damping must share a lag to stay bounded
        tau_y = lag()
        params = {
            "a1": 3.4, "a2": 0.8, "b1": 3.4, "b2": 0.8,
            "c_xy": _draw(rng, coupling),
            "tau_x1": 1, "tau_x2": 7,
            "tau_y1": tau_y, "tau_y2": tau_y,
            "tau_c": 5,
        }
    if transient is None:
        transient = default_transient(family)
    return SystemSpec(family=family, params=params, N=N, transient=transient, seed=int(master_seed))


def _random_var(rng, coupling, nvar, orders):
    """Unidirectional VAR pair/chain draw with rejection until stable."""
    for _ in range(1000):
        k = int(rng.choice(list(orders)))
        mats = [np.zeros((nvar, nvar)) for _ in range(k)]
        for var in range(nvar):
            at = int(rng.integers(0, k))
            mats[at][var, var] = float(rng.uniform(0.1, 0.9))
        # one directed cross link per adjacent pair: variable i drives i+1
        for target in range(1, nvar):
            value = _draw(rng, coupling)
            at = int(rng.integers(0, k))
            mats[at][target, target - 1] = value
        sigma = [float(v) for v in rng.uniform(0.95, 1.05, size=nvar)]
        if var_is_stable(mats):
            return {"coeffs": [m.tolist() for m in mats], "sigma": sigma}
    raise RejectionLimit("no stable var_k coefficient set found in 1000 draws")
