"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 numeric-domain error.
Every JSON report has the top-level keys ``config``, ``results`` and
``diagnostics``; ``config`` is the normalized run configuration, and
feeding a report back to ``entgrowth experiment`` re-runs it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from . import experiments as ex
from .coeffs import (IndexSequence, catalog_listing, complement, parse_complex,
                     parse_index_sequence, parse_source)
from .errors import AllSkipped, ConfigError, EntireGrowthError, RhoOutOfRange
from .growth import (default_window, order_from_coeffs, order_from_max_modulus, order_regression,
                     theta_of_rho, type_from_coeffs, type_from_max_modulus)
from .subseq import max_identity_check, rho_nu, tau_nu, theta_nu

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2
RHO_POLICIES = ("ground_truth", "regression", "explicit")
EXPERIMENTS = ("ae-order", "ae-type", "gdelta", "mean-value", "circle-integral", "exceptional-scan")
DEFAULT_R_GRID = (20.0, 40.0, 80.0, 160.0)


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, path) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _error_entry(e: Exception) -> dict:
    return {"error": type(e).__name__, "message": str(e)}


def parse_window(text):
    if text is None:
        return None
    lo, sep, hi = str(text).partition(":")
    try:
        if not sep:
            raise ValueError
        lo, hi = int(lo), int(hi)
        if not 1 <= lo <= hi:
            raise ValueError
        return lo, hi
    except ValueError:
        raise ConfigError(f"window must look like LO:HI with 1 <= LO <= HI, got {text!r}", "window") from None


def resolve_rho(src, policy: str, value=None, window=None) -> float:
    """The rho fed to type functionals under the given policy."""
    if policy == "explicit":
        if value is None:
            raise ConfigError("explicit rho policy needs a value", "rho")
        rho = float(value)
    elif policy == "ground_truth":
        if src.ground_truth is None:
            raise RhoOutOfRange(f"{src.id} has no ground truth order")
        rho = float(src.ground_truth.order)
    elif policy == "regression":
        rho = order_regression(src, window or default_window(2000)).value
    else:
        raise ConfigError(f"unknown rho policy {policy!r}", "rho")
    if not 0 < rho < math.inf:
        raise RhoOutOfRange(f"rho must lie in (0, inf), got {rho!r}")
    return rho


# catalog

def cmd_catalog(args) -> int:
    rows = catalog_listing()
    if args.json:
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
    else:
        for r in rows:
            sys.stdout.write(f"{r['spec']:<20} {r['ground_truth']}\n")
    return EXIT_OK


# analyze

def analyze(config: dict):
    """Run the single-source estimators; returns (results, diagnostics, failed)."""
    src = parse_source(config["source"])
    window = tuple(config["window"])
    results, failed = {}, False
    diag = {"ground_truth": src.ground_truth.to_dict() if src.ground_truth else None}

    def attempt(key, fn):
        nonlocal failed
        try:
            results[key] = fn()
        except EntireGrowthError as e:
            results[key] = _error_entry(e)
            failed = True

    if src.degree is not None:
        results["order"] = {"value": 0.0, "method": "degree", "degree": src.degree}
        results["type"] = "undefined"
        results["theta"] = 0.0
        return results, diag, failed

    attempt("order_window_sup", lambda: order_from_coeffs(src, window).to_dict())
    attempt("order_regression", lambda: order_regression(src, window).to_dict())
    primary = "order_regression" if config["method"] == "regression" else "order_window_sup"
    results["order"] = results[primary]
    rho = None
    try:
        rho = resolve_rho(src, config["rho_policy"], config["rho"], window)
    except RhoOutOfRange as e:
        results["type"] = _error_entry(e)
        failed = True
    if rho is not None:
        results["rho_used"] = {"policy": config["rho_policy"], "value": rho}
        attempt("type", lambda: _type_entry(src, rho, window))
        attempt("theta", lambda: theta_of_rho(rho).theta)
        attempt("order_max_modulus", lambda: order_from_max_modulus(src, config["r_grid"]).to_dict())
        attempt("type_max_modulus", lambda: type_from_max_modulus(src, rho, config["r_grid"]).to_dict())
    return results, diag, failed


def _type_entry(src, rho, window):
    est = type_from_coeffs(src, rho, window)
    d = est.to_dict()
    d["diverging"] = est.flags["diverging"]
    return d


def cmd_analyze(args) -> int:
    config = {
        "command": "analyze",
        "source": args.source,
        "window": list(parse_window(args.window) or default_window(2000)),
        "method": args.method,
        "rho_policy": args.rho_policy,
        "rho": args.rho,
        "r_grid": [float(r) for r in args.r_grid.split(",")] if args.r_grid else list(DEFAULT_R_GRID),
        "output": args.out,
    }
    results, diag, failed = analyze(config)
    _emit(ex.dumps_json({"config": config, "results": results, "diagnostics": diag}), args.out)
    return EXIT_NUMERIC if failed else EXIT_OK


# subseq

def subseq(config: dict):
    src = parse_source(config["source"])
    nu = parse_index_sequence(config["nu"])
    z = parse_complex(config["z"])
    horizon = int(config["horizon"])
    n_lo = max(2, horizon // 2)
    mu = complement(nu, horizon)
    full = IndexSequence.naturals()
    rho = None
    diag = {}
    try:
        rho = resolve_rho(src, config["rho_policy"], config["rho"])
    except RhoOutOfRange as e:
        diag["rho"] = _error_entry(e)
    results = {"rho_used": rho}
    parts = {"nu": nu, "mu": mu, "full": full}
    funcs = {
        "rho": lambda s: rho_nu(src, s, z, s.k_window(n_lo, horizon)),
        "theta": lambda s: theta_nu(src, s, z, s.k_window(n_lo, horizon)),
    }
    if rho is not None:
        funcs["tau"] = lambda s: tau_nu(src, s, z, rho, s.k_window(n_lo, horizon))
    for name, fn in funcs.items():
        entry = {}
        for part, seq in parts.items():
            try:
                est = fn(seq)
                entry[part] = {"value": est.value, "skipped": est.skipped,
                               "exact_zeros": est.exact_zeros, "k_window": list(est.k_window)}
            except AllSkipped as e:
                entry[part] = _error_entry(e)
        results[name] = entry
    results["identity"] = max_identity_check(src, nu, z, rho, horizon).to_dict()
    return results, diag


def cmd_subseq(args) -> int:
    config = {
        "command": "subseq",
        "source": args.source,
        "nu": args.nu,
        "z": args.z,
        "horizon": args.horizon,
        "rho_policy": args.rho_policy,
        "rho": args.rho,
        "output": args.out,
    }
    results, diag = subseq(config)
    _emit(ex.dumps_json({"config": config, "results": results, "diagnostics": diag}), args.out)
    return EXIT_OK


# experiment

def _need(cfg, key, kind=None):
    if key not in cfg or cfg[key] is None:
        raise ConfigError(f"missing required field {key!r}", key)
    v = cfg[key]
    if kind is not None and (not isinstance(v, kind) or isinstance(v, bool)):
        raise ConfigError(f"field {key!r} has the wrong type", key)
    return v


def _complex_field(v, key) -> complex:
    try:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            return complex(float(v[0]), float(v[1]))
        return parse_complex(v)
    except (TypeError, ValueError):
        raise ConfigError(f"field {key!r} is not a complex number", key) from None


def _z_list(z: complex) -> list:
    return [z.real, z.imag]


def normalize_experiment_config(raw: dict) -> dict:
    """Validate an experiment config and fill defaults; idempotent."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    if "config" in raw and "results" in raw:
        raw = raw["config"]
    name = _need(raw, "experiment", str)
    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}", "experiment")
    cfg = {"command": "experiment", "experiment": name}
    cfg["source"] = _need(raw, "source", str)
    cfg["nu"] = _need(raw, "nu", str)
    cfg["seed"] = _need(raw, "seed", int)
    for key in ("source", "nu"):
        try:
            (parse_source if key == "source" else parse_index_sequence)(cfg[key])
        except EntireGrowthError as e:
            raise ConfigError(f"field {key!r}: {e}", key) from None
    win = raw.get("window")
    if win is not None and (not isinstance(win, list) or len(win) != 2):
        raise ConfigError("field 'window' must be [lo, hi]", "window")
    cfg["window"] = [int(w) for w in win] if win else list(default_window(2000))

    if name in ("ae-type", "gdelta", "circle-integral"):
        rho = raw.get("rho", {"policy": "ground_truth"})
        if isinstance(rho, (int, float)) and not isinstance(rho, bool):
            rho = {"policy": "explicit", "value": rho}
        if not isinstance(rho, dict) or rho.get("policy") not in RHO_POLICIES:
            raise ConfigError("field 'rho' needs a policy among " + ", ".join(RHO_POLICIES), "rho")
        cfg["rho"] = {"policy": rho["policy"], "value": rho.get("value")}

    if name in ("ae-order", "ae-type"):
        s = _need(raw, "sampling", dict)
        mode = s.get("mode", "uniform")
        if mode not in ("uniform", "grid"):
            raise ConfigError("field 'sampling.mode' must be uniform or grid", "sampling.mode")
        cfg["sampling"] = {
            "center": _z_list(_complex_field(s.get("center", [0.0, 0.0]), "sampling.center")),
            "radius": float(_need(s, "radius")),
            "mode": mode,
            "count": int(s.get("count", 0)),
            "side": int(s.get("side", 0)),
            "extra": [_z_list(_complex_field(z, "sampling.extra")) for z in s.get("extra", [])],
        }
        if name == "ae-order":
            cfg["tol"] = float(raw.get("tol", 0.05))
        else:
            cfg["tol_rel"] = float(raw.get("tol_rel", 0.1))
    elif name == "gdelta":
        disks = _need(raw, "disks", list)
        cfg["disks"] = [[_z_list(_complex_field(d[0], "disks")), float(d[1])] for d in disks]
        cfg["K_schedule"] = [int(k) for k in raw.get("K_schedule", ex.DEFAULT_K_SCHEDULE)]
        cfg["samples"] = int(raw.get("samples", ex.GDELTA_SAMPLES))
    elif name == "mean-value":
        cfg["center"] = _z_list(_complex_field(_need(raw, "center"), "center"))
        cfg["radius"] = float(_need(raw, "radius"))
        cfg["rings"] = int(raw.get("rings", 16))
        cfg["spokes"] = int(raw.get("spokes", 32))
    elif name == "circle-integral":
        cfg["center"] = _z_list(_complex_field(raw.get("center", [0.0, 0.0]), "center"))
        cfg["radius"] = float(_need(raw, "radius"))
        cfg["K_schedule"] = [int(k) for k in raw.get("K_schedule", [200, 2000])]
        cfg["S"] = int(raw.get("S", 64))
    elif name == "exceptional-scan":
        g = _need(raw, "grid", dict)
        cfg["grid"] = {k: float(g.get(k, d)) for k, d in
                       (("x_min", -1.0), ("x_max", 1.0), ("y_min", -1.0), ("y_max", 1.0))}
        cfg["grid"].update(nx=int(g.get("nx", 0)), ny=int(g.get("ny", 0)))

    out = raw.get("output") or {}
    if not isinstance(out, dict):
        raise ConfigError("field 'output' must be an object", "output")
    cfg["output"] = {"json": out.get("json"), "csv": out.get("csv")}
    return cfg


def run_experiment(cfg: dict, workers: int = 1) -> ex.ExperimentReport:
    src = parse_source(cfg["source"])
    nu = parse_index_sequence(cfg["nu"])
    name = cfg["experiment"]
    window = tuple(cfg["window"])
    rho = None
    if "rho" in cfg:
        rho = resolve_rho(src, cfg["rho"]["policy"], cfg["rho"]["value"], window)
    if name in ("ae-order", "ae-type"):
        s = cfg["sampling"]
        spec = ex.SamplingSpec(complex(*s["center"]), s["radius"], s["mode"], s["count"], cfg["seed"],
                               s["side"], tuple(complex(*z) for z in s["extra"]))
        if name == "ae-order":
            return ex.ae_order_experiment(src, nu, spec, window, cfg["tol"], workers)
        return ex.ae_type_experiment(src, nu, spec, rho, window, cfg["tol_rel"], workers)
    if name == "gdelta":
        disks = [(complex(*c), r) for c, r in cfg["disks"]]
        return ex.gdelta_probe(src, nu, disks, rho, cfg["K_schedule"], cfg["seed"], cfg["samples"], workers)
    if name == "mean-value":
        mv = ex.mean_value_check(src, nu, window, complex(*cfg["center"]), cfg["radius"],
                                 cfg["rings"], cfg["spokes"], workers)
        rep = ex.ExperimentReport("mean_value", {"source": src.id, "nu": nu.label}, [mv.to_dict()],
                                  seed=cfg["seed"], diagnostics={"holds": mv.holds})
        return rep
    if name == "circle-integral":
        return ex.circle_integral_probe(src, nu, rho, complex(*cfg["center"]), cfg["radius"],
                                        cfg["K_schedule"], cfg["S"], workers)
    grid = ex.GridSpec(**cfg["grid"])
    return ex.exceptional_set_scan(src, nu, grid, window, workers)


def cmd_experiment(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {args.config}: {e}", "config") from None
    cfg = normalize_experiment_config(raw)
    if args.out:
        cfg["output"]["json"] = args.out
    if args.csv:
        cfg["output"]["csv"] = args.csv
    report = run_experiment(cfg, args.workers)
    results = report.to_dict()
    diagnostics = results.pop("diagnostics")
    _emit(ex.dumps_json({"config": cfg, "results": results, "diagnostics": diagnostics}),
          cfg["output"]["json"])
    if cfg["output"]["csv"]:
        write_atomic(cfg["output"]["csv"], report.to_csv())
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="entgrowth", description="Growth of entire functions from Taylor data.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="list catalog sources")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_catalog)

    def rho_flags(q):
        q.add_argument("--rho-policy", choices=RHO_POLICIES, default="ground_truth")
        q.add_argument("--rho", type=float, default=None, help="value for the explicit policy")
        q.add_argument("--out", default=None, help="JSON report path (default stdout)")

    a = sub.add_parser("analyze", help="order, type and theta estimates for one source")
    a.add_argument("source")
    a.add_argument("--window", default=None, help="n-window LO:HI (default 1000:2000)")
    a.add_argument("--method", choices=("window_sup", "regression"), default="window_sup")
    a.add_argument("--r-grid", default=None, help="comma-separated radii for max-modulus checks")
    rho_flags(a)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("subseq", help="subsequence functionals and partition identities")
    s.add_argument("source")
    s.add_argument("--nu", required=True)
    s.add_argument("--z", default="0")
    s.add_argument("--horizon", type=int, default=2000)
    rho_flags(s)
    s.set_defaults(func=cmd_subseq)

    e = sub.add_parser("experiment", help="run an experiment from a JSON config or report")
    e.add_argument("config")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out", default=None, help="override output.json")
    e.add_argument("--csv", default=None, help="override output.csv")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        where = f" (field {e.field!r})" if e.field else ""
        sys.stderr.write(f"config error{where}: {e}\n")
        return EXIT_CONFIG
    except EntireGrowthError as e:
        sys.stderr.write(f"{type(e).__name__}: {e}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
