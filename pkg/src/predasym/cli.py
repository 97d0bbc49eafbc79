"""Command-line front end.

Four subcommands cover the library surface: `generate` synthesizes a system
realization to CSV plus truth-graph and spec JSON, `asymmetry` runs the
directed test on two columns of a CSV, `sweep` runs a benchmark grid from a
JSON config, and `ensemble` computes percentile ribbons from segment and
uncertainty resampling. Every output prefix gains a `.config.json` sidecar
holding the full effective configuration, so any emitted run reproduces its
files byte for byte.

Exit codes: 0 success, 2 rejected input, 3 numerical failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import systems
from .asymmetry import PredictiveAsymmetryTest
from .exceptions import InvalidParams, NumericalError, ParseError, ValidationError
from .resampling import SegmentSpec, ensemble_asymmetry, ensemble_to_csv_text
from .robustness import sweep
from .series import load_series, load_uncertain_series, save_series


def _resolve_seed(value):
    if value is not None:
        return int(value)
    env = os.environ.get("PREDASYM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InvalidParams(f"PREDASYM_SEED must be an integer, got {env!r}")
    return 0


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sidecar(prefix, subcommand, config):
    _write_json(prefix + ".config.json", {"subcommand": subcommand, **config})


def _pick_column(ms, key, default_index):
    if key is None:
        if default_index >= len(ms):
            raise ParseError(
                f"input has {len(ms)} columns; need at least {default_index + 1}"
            )
        return ms[default_index]
    try:
        return ms[int(key)]
    except ValueError:
        return ms[key]


def cmd_generate(args):
    seed = _resolve_seed(args.seed)
    if args.params is not None:
        text = args.params
        if text.startswith("@"):
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        try:
            params = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"--params is not valid JSON: {exc}")
        if not isinstance(params, dict):
            raise ParseError("--params must be a JSON object")
        spec = systems.make_spec(args.family, args.n, seed, transient=args.transient, **params)
    elif args.coupling is not None:
        coupling = args.coupling[0] if len(args.coupling) == 1 else tuple(args.coupling)
        spec = systems.random_system(
            args.family, coupling, args.n, seed,
            n_vars=args.n_vars, transient=args.transient,
        )
    else:
        spec = systems.make_spec(args.family, args.n, seed, transient=args.transient)

    ms = systems.generate(spec)
    save_series(ms, args.output + ".csv")
    _write_json(
        args.output + ".truth.json",
        {"labels": list(ms.labels), "edges": [list(e) for e in systems.truth_graph(spec)]},
    )
    with open(args.output + ".spec.json", "w", encoding="utf-8") as fh:
        fh.write(spec.to_json())
        fh.write("\n")
    _sidecar(args.output, "generate", {
        "family": args.family, "n": args.n, "seed": seed,
        "transient": spec.transient, "params": spec.params,
    })
    return 0


def cmd_asymmetry(args):
    seed = _resolve_seed(args.seed)
    ms = load_series(args.input)
    x = _pick_column(ms, args.source, 0)
    y = _pick_column(ms, args.target, 1)
    test = PredictiveAsymmetryTest(
        eta_max=args.eta_max, f=args.f, estimator=args.estimator,
        k=args.k, l=args.l, m=args.m, tau=args.tau, n_jobs=args.jobs,
    )
    test.fit(np.column_stack([x.values, y.values]))

    lags = [v for v in range(-args.eta_max, args.eta_max + 1) if v != 0]
    lines = ["lag,te_xy,te_yx"]
    for lag in lags:
        lines.append(
            f"{lag},{test.spectrum_xy_.value_at(lag)!r},{test.spectrum_yx_.value_at(lag)!r}"
        )
    with open(args.output + ".spectrum.csv", "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    lines = ["eta,a_xy,a_norm_xy,a_yx,a_norm_yx"]
    cxy, cyx = test.curve_xy_, test.curve_yx_
    for i, eta in enumerate(cxy.etas):
        lines.append(
            f"{eta},{float(cxy.values[i])!r},{float(cxy.normalized[i])!r},"
            f"{float(cyx.values[i])!r},{float(cyx.normalized[i])!r}"
        )
    with open(args.output + ".asymmetry.csv", "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    xl = x.label or "x"
    yl = y.label or "y"
    print(f"{xl}->{yl}: {'positive' if test.detections_[0] else 'negative'}")
    print(f"{yl}->{xl}: {'positive' if test.detections_[1] else 'negative'}")
    _sidecar(args.output, "asymmetry", {
        "input": args.input, "source": xl, "target": yl,
        "estimator": args.estimator, "eta_max": args.eta_max, "f": args.f,
        "k": args.k, "l": args.l, "m": args.m, "tau": args.tau,
        "seed": seed, "jobs": args.jobs,
    })
    return 0


_SWEEP_REQUIRED = {
    "family": str,
    "coupling_grid": list,
    "length_grid": list,
    "ensemble_size": int,
}
_SWEEP_OPTIONAL = {
    "eta_max": 10, "f": 1.0, "estimator": "vf", "master_seed": None,
    "tau": 1, "obs_noise": None, "n_vars": None, "order_set": None,
    "transient": None,
}


def _load_sweep_config(path, fallback_seed):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    cfg = {}
    for field, kind in _SWEEP_REQUIRED.items():
        if field not in raw:
            raise InvalidParams(f"config field '{field}' is missing")
        value = raw[field]
        if kind is int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidParams(f"config field '{field}' must be an integer")
        elif not isinstance(value, kind):
            raise InvalidParams(f"config field '{field}' must be a {kind.__name__}")
        cfg[field] = value
    for field, default in _SWEEP_OPTIONAL.items():
        cfg[field] = raw.get(field, default)
    unknown = set(raw) - set(_SWEEP_REQUIRED) - set(_SWEEP_OPTIONAL)
    if unknown:
        raise InvalidParams(f"config field '{sorted(unknown)[0]}' is not recognized")
    if cfg["master_seed"] is None:
        cfg["master_seed"] = fallback_seed
    if cfg["order_set"] is not None:
        cfg["order_set"] = tuple(cfg["order_set"])
    cfg["coupling_grid"] = [
        tuple(e) if isinstance(e, list) else e for e in cfg["coupling_grid"]
    ]
    return cfg


def cmd_sweep(args):
    seed = _resolve_seed(args.seed)
    cfg = _load_sweep_config(args.config, seed)
    result = sweep(n_jobs=args.jobs, **cfg)
    with open(args.output + ".csv", "w", encoding="utf-8") as fh:
        fh.write(result.to_csv_text())
    with open(args.output + ".json", "w", encoding="utf-8") as fh:
        fh.write(result.to_json_text())
        fh.write("\n")
    _sidecar(args.output, "sweep", {
        **{k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items()},
        "coupling_grid": [list(e) if isinstance(e, tuple) else e for e in cfg["coupling_grid"]],
        "jobs": args.jobs,
    })
    return 0


def cmd_ensemble(args):
    seed = _resolve_seed(args.seed)
    if args.uncertain_x or args.uncertain_y:
        if not (args.uncertain_x and args.uncertain_y):
            raise InvalidParams("--uncertain-x and --uncertain-y must be given together")
        x = load_uncertain_series(args.uncertain_x)
        y = load_uncertain_series(args.uncertain_y)
        source_desc, target_desc = args.uncertain_x, args.uncertain_y
    else:
        if args.input is None:
            raise InvalidParams("ensemble needs --input or --uncertain-x/--uncertain-y")
        ms = load_series(args.input)
        x = _pick_column(ms, args.source, 0)
        y = _pick_column(ms, args.target, 1)
        source_desc, target_desc = x.label or "x", y.label or "y"

    segments = SegmentSpec(args.segments, args.min_frac, args.max_frac, seed)
    curves = ensemble_asymmetry(
        x, y, segments, resamples=args.resamples, eta_max=args.eta_max, f=args.f,
        estimator=args.estimator, percentiles=tuple(args.percentiles),
        bin_width=args.bin_width, k=args.k, l=args.l, m=args.m, tau=args.tau,
        n_jobs=args.jobs,
    )
    xl = getattr(x, "label", "") or "x"
    yl = getattr(y, "label", "") or "y"
    named = {f"{xl}->{yl}": curves["xy"], f"{yl}->{xl}": curves["yx"]}
    with open(args.output + ".csv", "w", encoding="utf-8") as fh:
        fh.write(ensemble_to_csv_text(named))
    _sidecar(args.output, "ensemble", {
        "input": args.input, "uncertain_x": args.uncertain_x,
        "uncertain_y": args.uncertain_y, "source": source_desc,
        "target": target_desc, "segments": args.segments,
        "min_frac": args.min_frac, "max_frac": args.max_frac,
        "resamples": args.resamples, "bin_width": args.bin_width,
        "eta_max": args.eta_max, "f": args.f, "estimator": args.estimator,
        "percentiles": list(args.percentiles), "k": args.k, "l": args.l,
        "m": args.m, "tau": args.tau, "seed": seed, "jobs": args.jobs,
    })
    return 0


def _add_common(parser):
    parser.add_argument("--estimator", choices=("vf", "nn"), default="vf")
    parser.add_argument("--eta-max", type=int, default=10)
    parser.add_argument("--f", type=float, default=1.0)
    parser.add_argument("--k", type=int, default=1)
    parser.add_argument("--l", type=int, default=1)
    parser.add_argument("--m", type=int, default=1)
    parser.add_argument("--tau", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="predasym",
        description="Directed causality testing from the asymmetry of "
                    "transfer entropy across prediction lags.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("generate", help="synthesize a system realization")
    p.add_argument("--family", required=True, choices=systems.FAMILIES)
    p.add_argument("--n", type=int, required=True, help="series length")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--transient", type=int, default=None)
    p.add_argument("--params", default=None,
                   help="explicit parameter JSON object, or @file")
    p.add_argument("--coupling", type=float, nargs="+", default=None,
                   help="randomized parameters with this coupling (one value) "
                        "or coupling interval (two values)")
    p.add_argument("--n-vars", type=int, default=None)
    p.add_argument("--output", required=True, help="output path prefix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("asymmetry", help="directed test on two CSV columns")
    p.add_argument("--input", required=True)
    p.add_argument("--source", default=None, help="column label or index")
    p.add_argument("--target", default=None, help="column label or index")
    _add_common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", required=True, help="output path prefix")
    p.set_defaults(func=cmd_asymmetry)

    p = sub.add_parser("sweep", help="benchmark grid from a JSON config")
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed fallback when the config omits it")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", required=True, help="output path prefix")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ensemble", help="asymmetry ribbons from resampling")
    p.add_argument("--input", default=None, help="two-column CSV")
    p.add_argument("--source", default=None)
    p.add_argument("--target", default=None)
    p.add_argument("--uncertain-x", default=None, help="uncertain-series CSV")
    p.add_argument("--uncertain-y", default=None, help="uncertain-series CSV")
    p.add_argument("--segments", type=int, default=100)
    p.add_argument("--min-frac", type=float, default=0.75)
    p.add_argument("--max-frac", type=float, default=1.0)
    p.add_argument("--resamples", type=int, default=0)
    p.add_argument("--bin-width", type=float, default=None)
    p.add_argument("--percentiles", type=float, nargs=2, default=(10.0, 90.0))
    _add_common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", required=True, help="output path prefix")
    p.set_defaults(func=cmd_ensemble)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
