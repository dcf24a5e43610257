"""Command-line front end.

    gpjflow simulate --a -3 --profile parabola --gamma 1 --t-end 2 --out run1
    gpjflow classify --a 1 --profile cosine
    gpjflow sweep --a -2.5 -2 -0.5 --profile parabola zigzag --out sweep1
    gpjflow xcheck --a 0 --profile parabola --gamma 2 --t-end 1 --grid 512
    gpjflow oracle --a -2 --profile parabola

Data goes to files (simulate, sweep) or standard output (classify,
xcheck, oracle); diagnostics go to standard error at the level set by
GPJ_LOG (error, info or debug).

Exit codes: 0 success (a detected blow-up is a result, not an error),
3 invalid configuration, 4 numerical failure.
"""

import argparse
import copy
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bracket import ModelParams, min_bracket
from .criteria import classify
from .errors import DomainError, GPJError, NumericalFailure, QuadratureFailure
from .eta import EVENT_EPS, eta_rhs, solve_eta
from .eulerian import compare, evolve
from .flowmap import FlowSnapshot, sample_eulerian
from .profiles import KINDS, make_profile
from . import reference as ref

log = logging.getLogger("gpjflow")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 3, 4
SCHEMA_VERSION = "1"
TRAJECTORY_COLUMNS = ("t", "eta", "eta_prime", "min_bracket")
SWEEP_COLUMNS = ("a", "kind", "gamma", "n_modes", "verdict", "status", "t_star_or_horizon",
                 "min_bracket_at_horizon", "error")

DEFAULTS = {
    "a": None,
    "bc": "dirichlet",
    "profile": {"kind": "parabola", "gamma": 1.0, "n_modes": None, "samples": None, "coeffs": None},
    "t_end": 1.0,
    "grid_n": 257,
    "n_improved": 4,
    "tolerances": {"ode": 1e-9, "quad": 1e-11, "event": EVENT_EPS},
    "outputs": {"trajectory": "trajectory.csv", "snapshot_times": [], "report": "report.json"},
    "xcheck": False,
    "xcheck_grid": 512,
}


class ConfigError(Exception):
    """The run configuration is malformed."""


# -- configuration ------------------------------------------------------------

def _merge(base, over):
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _number(cfg, key, cast=float):
    try:
        v = cast(cfg[key])
    except (TypeError, ValueError, KeyError):
        raise ConfigError(f"{key} must be a number") from None
    if isinstance(v, float) and not math.isfinite(v):
        raise ConfigError(f"{key} must be finite")
    return v


def load_samples(path):
    """Read (xi, u0) pairs from a two-column CSV (header optional)."""
    rows = []
    seen_header = False
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows or seen_header:
                    raise ValueError(f"non-numeric row {row!r} in {path}") from None
                seen_header = True
    return rows


def build_config(args):
    """Merge defaults, an optional JSON config file and command-line flags."""
    cfg = copy.deepcopy(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = _merge(cfg, json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    flags = {}
    if getattr(args, "a", None) is not None and not isinstance(args.a, list):
        flags["a"] = args.a
    prof = {}
    if getattr(args, "profile", None) and not isinstance(args.profile, list):
        prof["kind"] = args.profile
    if getattr(args, "gamma", None) is not None:
        prof["gamma"] = args.gamma
    if getattr(args, "modes", None) is not None:
        prof["n_modes"] = args.modes
    if prof:
        flags["profile"] = prof
    if getattr(args, "t_end", None) is not None:
        flags["t_end"] = args.t_end
    if getattr(args, "grid", None) is not None:
        flags["grid_n"] = args.grid
    if getattr(args, "xcheck", False):
        flags["xcheck"] = True
    base = Path(args.config).parent if getattr(args, "config", None) else None
    return validate_config(_merge(cfg, flags), base=base)


def validate_config(cfg, base=None):
    if cfg.get("a") is None:
        raise ConfigError("the exponent a is required (--a or config key 'a')")
    cfg["a"] = _number(cfg, "a")
    cfg["t_end"] = _number(cfg, "t_end")
    if not cfg["t_end"] > 0:
        raise ConfigError("t_end must be positive")
    cfg["grid_n"] = _number(cfg, "grid_n", int)
    if cfg["grid_n"] < 16:
        raise ConfigError("grid_n must be at least 16")
    cfg["n_improved"] = _number(cfg, "n_improved", int)
    if not 2 <= cfg["n_improved"] <= 12:
        raise ConfigError("n_improved must lie in [2, 12]")
    if cfg.get("bc") not in ("dirichlet", "periodic_meanfree"):
        raise ConfigError("bc must be dirichlet or periodic_meanfree")
    tol = cfg["tolerances"]
    for key, hi in (("ode", 1e-2), ("quad", 1e-2), ("event", 1e-3)):
        v = _number(tol, key)
        if not 0 < v < hi:
            raise ConfigError(f"tolerances.{key} must lie in (0, {hi})")
        tol[key] = v
    times = cfg["outputs"].get("snapshot_times") or []
    try:
        times = [float(t) for t in times]
    except (TypeError, ValueError):
        raise ConfigError("outputs.snapshot_times must be a list of numbers") from None
    if any(not 0 <= t <= cfg["t_end"] for t in times):
        raise ConfigError("snapshot times must lie in [0, t_end]")
    cfg["outputs"]["snapshot_times"] = times
    p = cfg["profile"]
    if p.get("kind") not in KINDS:
        raise ConfigError(f"profile.kind must be one of {KINDS}")
    if p.get("samples") is not None and isinstance(p["samples"], str) and base is not None:
        p["samples"] = str((base / p["samples"]).resolve()) if not os.path.isabs(p["samples"]) else p["samples"]
    if cfg["xcheck"] and cfg["bc"] != "dirichlet":
        raise ConfigError("the Eulerian cross-check supports Dirichlet boundaries only")
    cfg["xcheck_grid"] = _number(cfg, "xcheck_grid", int)
    if cfg["xcheck_grid"] < 128:
        raise ConfigError("xcheck_grid must be at least 128")
    return cfg


def profile_from_spec(spec):
    samples = spec.get("samples")
    if isinstance(samples, str):
        try:
            samples = load_samples(samples)
        except (OSError, ValueError, IndexError) as exc:
            raise ConfigError(f"cannot read samples: {exc}") from None
    try:
        return make_profile(spec["kind"], spec.get("gamma", 1.0), n_modes=spec.get("n_modes"),
                            samples=samples, coeffs=spec.get("coeffs"))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def params_from_config(cfg):
    try:
        return ModelParams(cfg["a"], cfg.get("bc", "dirichlet"))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


# -- output helpers -----------------------------------------------------------

def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_trajectory(path, profile, params, traj):
    rows = [(t, e, ep, min_bracket(profile, params, e))
            for t, e, ep in zip(traj.times, traj.eta, traj.eta_prime)]
    write_csv(path, TRAJECTORY_COLUMNS, rows)


def write_snapshot(path, snap: FlowSnapshot):
    write_csv(path, FlowSnapshot.COLUMNS, snap.table().tolist())


# -- oracles ------------------------------------------------------------------

def _uniform_slope(profile):
    return profile.kind in ("parabola", "zigzag") and profile.gamma > 0


def oracle_values(profile, params):
    """Closed-form values that apply to this (profile, a), as OracleResult records."""
    a = params.a
    g = profile.gamma
    out = []
    if profile.is_zero:
        return out
    if a == -3 and profile.u_min > 0:
        out.append(ref.OracleResult("burgers_tstar", ref.burgers_tstar(profile), (0.0, math.inf)))
    if a == -2 and profile.u_min > 0:
        out.append(ref.OracleResult("hs_tstar", ref.hs_tstar(profile), (0.0, math.inf)))
    if profile.kind == "parabola" and g > 0 and a == 0:
        out.append(ref.OracleResult("cc_eta_limit", 2.0 / g, (0.0, math.inf)))
    if profile.kind == "parabola" and g > 0 and a == 1:
        out.append(ref.OracleResult("pj_tstar", ref.pj_tstar(g), (0.0, math.inf)))
    if profile.kind == "zigzag" and g > 0 and a == 1:
        out.append(ref.OracleResult("zigzag_tstar", ref.pj_tstar(g), (0.0, math.inf)))
    if profile.kind == "cosine" and g > 0 and a == 1:
        out.append(ref.OracleResult("cosine_eta_limit", math.pi**2 / (8.0 * g), (0.0, math.inf)))
    return out


def oracle_deltas(profile, params, traj):
    """Differences between oracle values and the solved trajectory."""
    deltas = []
    a, g = params.a, profile.gamma
    if traj is None:
        return deltas
    nodes = traj.times
    for o in oracle_values(profile, params):
        if o.name.endswith("tstar"):
            sim = traj.t_star
            deltas.append({"name": o.name, "oracle": o.value, "simulated": sim,
                           "delta": None if sim is None else sim - o.value})
    if a == -3:
        deltas.append({"name": "eta_equals_t", "delta": float(np.max(np.abs(traj.eta - nodes)))})
    if a == -2 and profile.u_min > 0:
        cut = 0.9 * ref.hs_tstar(profile)
        sel = nodes[nodes <= cut]
        exact = np.array([ref.hs_eta(profile, t) for t in sel])
        deltas.append({"name": "hs_eta_sup", "delta": float(np.max(np.abs(traj.eta[: sel.size] - exact)))})
    if profile.kind == "parabola" and a == 0 and g > 0:
        exact = np.array([ref.cc_eta(g, t) for t in nodes])
        deltas.append({"name": "cc_eta_sup", "delta": float(np.max(np.abs(traj.eta - exact)))})
    if profile.kind == "cosine" and a == 1 and g > 0:
        exact = np.array([ref.cosine_eta_closed(g, t) for t in nodes])
        deltas.append({"name": "cosine_eta_sup", "delta": float(np.max(np.abs(traj.eta - exact)))})
    if _uniform_slope(profile) and not params.is_minus_one and math.isfinite(traj.eta_crit):
        etas = np.linspace(0.0, 0.99, 11) * traj.eta_crit
        d = max(abs(eta_rhs(profile, params, e) - ref.zigzag_eta_rhs_closed(g, a, e)) for e in etas)
        deltas.append({"name": "uniform_slope_eta_rhs", "delta": float(d)})
    return deltas


# -- commands -----------------------------------------------------------------

def _snapshot_name(t):
    return f"snapshot_t{t!r}.csv"


def run(cfg, out_dir):
    """Execute one configured experiment; returns (exit code, report dict)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    profile = profile_from_spec(cfg["profile"])
    params = params_from_config(cfg)
    tol = cfg["tolerances"]

    crit_report = classify(profile, params, n_improved=cfg["n_improved"])
    report = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config": cfg,
        "profile": dict(profile.describe(), u_min=profile.u_min, u_max=profile.u_max),
        "params": {"a": params.a, "alpha": params.alpha, "regime": params.regime, "bc": params.bc},
        "criteria": crit_report.to_dict(),
        "verdict": crit_report.verdict,
        "notes": [
            "closed-form eta' for uniformly distributed slopes uses the prefactor fixed by psi(0) = 1",
            "cosine clock uses the exact integral (1 - beta^2)^(-1/2) of 1/(1 - beta cos 2 pi s)",
        ],
    }
    if params.bc == "periodic_meanfree":
        report["notes"].append("periodic run: positions F are reported modulo a rigid translation")

    traj = None
    if params.is_minus_one:
        report.update(status="reached_t_end", t_star=None, eta_star=None, eta_crit=None,
                      mechanism=None, horizon=cfg["t_end"], trajectory=None)
    else:
        traj = solve_eta(profile, params, cfg["t_end"], tol=tol["ode"], quad_tol=tol["quad"],
                         event_eps=tol["event"])
        traj_path = out_dir / cfg["outputs"]["trajectory"]
        write_trajectory(traj_path, profile, params, traj)
        report.update(status=traj.status, t_star=traj.t_star, eta_star=traj.eta_star,
                      eta_crit=traj.eta_crit, mechanism=traj.mechanism, horizon=traj.horizon,
                      closure_reachable=traj.closure_reachable, closure_rule=traj.closure_rule,
                      saturated_at=traj.saturated_at, reason=traj.reason,
                      min_bracket_final=min_bracket(profile, params, traj.eta[-1]),
                      trajectory=traj_path.name)
    report["oracle"] = {
        "values": [{"name": o.name, "value": o.value} for o in oracle_values(profile, params)],
        "deltas": oracle_deltas(profile, params, traj),
    }

    snaps = []
    for t in cfg["outputs"]["snapshot_times"]:
        if traj is not None and traj.status == "blowup" and t >= traj.t_star:
            snaps.append({"t": t, "path": None, "skipped": "at or beyond blow-up"})
            continue
        if traj is not None and traj.status == "numerical_failure" and t > traj.times[-1]:
            snaps.append({"t": t, "path": None, "skipped": "beyond numerical failure"})
            continue
        snap = sample_eulerian(profile, params, traj, t, cfg["grid_n"], tol=tol["quad"])
        name = _snapshot_name(t)
        write_snapshot(out_dir / name, snap)
        snaps.append({"t": t, "path": name, "F1_minus_1": float(snap.F[-1] - 1.0),
                      "min_F_xi": float(np.min(snap.F_xi))})
    report["snapshots"] = snaps

    if cfg["xcheck"]:
        report["xcheck"] = cross_check(profile, params, traj, cfg["t_end"], cfg["xcheck_grid"])

    code = EXIT_NUMERICAL if report["status"] == "numerical_failure" else EXIT_OK
    report = _clean(report)
    with open(out_dir / cfg["outputs"]["report"], "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return code, report


def cross_check(profile, params, traj, t_end, N):
    """Eulerian vs Lagrangian at t = min(1, t_end, t*/2), at N and N/2 points."""
    horizon = traj.t_star if traj is not None and traj.status == "blowup" else math.inf
    t = min(1.0, t_end, 0.5 * horizon)
    snap = sample_eulerian(profile, params, traj, t, 4 * N + 1)
    out = {"t": t, "N": N}
    for n, key in ((N, "fine"), (N // 2, "coarse")):
        runr = evolve(profile, params, t, n)
        out[key] = dict(compare(snap, runr.final), status=runr.status, steps=runr.n_steps)
    fine, coarse = out["fine"]["linf_u"], out["coarse"]["linf_u"]
    out["ratio"] = coarse / fine if fine > 0 else None
    return out


def _sweep_cell(job):
    a, spec, t_end = job
    row = {"a": a, "kind": spec["kind"], "gamma": spec.get("gamma", 1.0), "n_modes": spec.get("n_modes"),
           "verdict": None, "status": None, "t_star_or_horizon": None, "min_bracket_at_horizon": None,
           "error": None}
    try:
        profile = profile_from_spec(spec)
        params = ModelParams(a)
        row["verdict"] = classify(profile, params).verdict
        if params.is_minus_one:
            row.update(status="reached_t_end", t_star_or_horizon=t_end)
        else:
            traj = solve_eta(profile, params, t_end)
            row.update(status=traj.status, t_star_or_horizon=traj.horizon if traj.status != "numerical_failure"
                       else float(traj.times[-1]),
                       min_bracket_at_horizon=min_bracket(profile, params, traj.eta[-1]))
    except (GPJError, ConfigError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return [row[c] for c in SWEEP_COLUMNS]


def sweep(a_values, specs, t_end, out_dir, workers=1):
    """Regime map: one row per (a, profile), in input order."""
    if not a_values or not specs:
        raise ConfigError("sweep needs at least one a value and one profile")
    jobs = [(float(a), s, float(t_end)) for a in a_values for s in specs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(j) for j in jobs]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "regime_map.csv"
    write_csv(path, SWEEP_COLUMNS, rows)
    return path, rows


# -- argument parsing ---------------------------------------------------------

def _common(p, multi=False):
    p.add_argument("--config", help="JSON run configuration")
    if multi:
        p.add_argument("--a", type=float, nargs="+", help="exponent values")
        p.add_argument("--profile", nargs="+", choices=KINDS, help="profile kinds")
    else:
        p.add_argument("--a", type=float, help="exponent a")
        p.add_argument("--profile", choices=KINDS, help="profile kind")
    p.add_argument("--gamma", type=float, help="profile amplitude")
    p.add_argument("--modes", type=int, help="number of modes (fourier_zigzag)")
    p.add_argument("--t-end", type=float, dest="t_end", help="final time")


def make_parser():
    parser = argparse.ArgumentParser(prog="gpjflow", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="solve, sample and report one configuration")
    _common(p)
    p.add_argument("--grid", type=int, help="labels per snapshot")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--xcheck", action="store_true", help="also run the Eulerian cross-check")

    p = sub.add_parser("classify", help="evaluate the existence / blow-up criteria")
    _common(p)

    p = sub.add_parser("sweep", help="regime map over a values and profiles")
    _common(p, multi=True)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")

    p = sub.add_parser("xcheck", help="Eulerian vs Lagrangian comparison")
    _common(p)
    p.add_argument("--grid", type=int, default=512, help="Eulerian grid points")

    p = sub.add_parser("oracle", help="print closed-form values for validation")
    _common(p)
    return parser


def _setup_logging():
    level = os.environ.get("GPJ_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _sweep_inputs(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    a_values = args.a if args.a is not None else cfg.get("a_values", [])
    if args.profile is not None:
        specs = [{"kind": k, "gamma": args.gamma if args.gamma is not None else 1.0,
                  "n_modes": args.modes if k == "fourier_zigzag" else None} for k in args.profile]
    else:
        specs = cfg.get("profiles", [])
    for s in specs:
        if s.get("kind") not in KINDS:
            raise ConfigError(f"unknown profile kind {s.get('kind')!r}")
    t_end = args.t_end if args.t_end is not None else cfg.get("t_end", 5.0)
    if not t_end > 0:
        raise ConfigError("t_end must be positive")
    return list(a_values), specs, t_end


def main(argv=None):
    _setup_logging()
    args = make_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            a_values, specs, t_end = _sweep_inputs(args)
            path, _ = sweep(a_values, specs, t_end, args.out, workers=max(1, args.workers))
            log.info("wrote %s", path)
            return EXIT_OK
        cfg = build_config(args)
        if args.command == "simulate":
            code, report = run(cfg, args.out)
            log.info("status %s, verdict %s", report["status"], report["verdict"])
            return code
        profile = profile_from_spec(cfg["profile"])
        params = params_from_config(cfg)
        if args.command == "classify":
            payload = classify(profile, params, n_improved=cfg["n_improved"]).to_dict()
        elif args.command == "xcheck":
            if params.bc != "dirichlet":
                raise ConfigError("the Eulerian cross-check supports Dirichlet boundaries only")
            traj = None if params.is_minus_one else solve_eta(profile, params, cfg["t_end"])
            payload = cross_check(profile, params, traj, cfg["t_end"], args.grid)
        else:
            payload = [{"name": o.name, "value": o.value, "validity": list(o.validity)}
                       for o in oracle_values(profile, params)]
        json.dump(_clean(payload), sys.stdout, indent=2, sort_keys=True, allow_nan=False)
        sys.stdout.write("\n")
        return EXIT_OK
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, QuadratureFailure) as exc:
        log.error("numerical failure: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
