"""Command-line front end.

Subcommands: ``dist`` (analytic curves plus MC histograms), ``moments``
(deterministic trajectories and the horizon-gap table), ``verify`` (the full
verification suite), ``optimize`` (a full optimizer run). Each accepts a JSON
config file plus flag overrides; unknown config keys are rejected before any
computation. Exit codes: 0 success, 1 verification failure, 2 usage or
config error.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import presets
from .acceptance import DEFAULT_SEED, DEFAULT_TRIALS, run_acceptance
from .core import run_gwo
from .dist import (leader_step_cdf_curve, leader_step_curve, support_params,
                   update_pdf)
from .mcverify import (Histogram, SimConfig, sample_leader_step,
                       sample_update, simulate_stagnation, trapezoid_cdf)
from .moments import gap_table, moment_trajectory, write_gap_table
from .objectives import make_objective, objective_names


class ConfigError(ValueError):
    """Bad configuration or arguments; maps to exit code 2."""


def _load_config(path, allowed):
    if path is None:
        return {}
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(payload) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return payload


def _merge(args, config, key, default=None):
    """Flag value if given, else config value, else default."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _parse_triple(value, field):
    if isinstance(value, (int, float)):
        return (float(value),) * 3
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    try:
        vals = [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field {field} must be numeric: {value!r}") from exc
    if len(vals) == 1:
        return (vals[0],) * 3
    if len(vals) != 3:
        raise ConfigError(f"field {field} needs one or three values")
    return tuple(vals)


def _outdir(args, config):
    out = Path(_merge(args, config, "out", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_dist_set(name, a, p, x, out, seed, trials, cells, bins):
    """Emit the analytic curve and histogram files for one parameter set."""
    if not a > 0:
        raise ConfigError(f"field a must be positive, got {a}")
    p1, p2, p3 = p
    for k, pk in enumerate((p1, p2, p3), start=1):
        sp = support_params(a, pk, x)
        leader_step_curve(sp, cells=cells).to_csv(out / f"{name}_g{k}.csv")
        leader_step_cdf_curve(sp, points=cells + 1).to_csv(
            out / f"{name}_G{k}.csv")
    h = update_pdf(a, p1, p2, p3, x, cells=cells)
    h.to_csv(out / f"{name}_h.csv")
    trapezoid_cdf(h).to_csv(out / f"{name}_H.csv")

    sp1 = support_params(a, p1, x)
    step_samples = sample_leader_step(a, p1, x, trials, seed, dim=0)
    Histogram.from_samples(step_samples, bins=bins,
                           value_range=(sp1.p - sp1.n, sp1.p + sp1.n)
                           ).to_csv(out / f"{name}_hist_step.csv")
    upd_samples = sample_update(a, p1, p2, p3, x, trials, seed, dim=0)
    Histogram.from_samples(upd_samples, bins=bins, value_range=h.support
                           ).to_csv(out / f"{name}_hist_update.csv")


_DIST_KEYS = ("preset", "a", "p", "x", "bins", "cells", "trials", "seed", "out")


def cmd_dist(args):
    config = _load_config(args.config, _DIST_KEYS)
    out = _outdir(args, config)
    seed = int(_merge(args, config, "seed", DEFAULT_SEED))
    trials = int(_merge(args, config, "trials", DEFAULT_TRIALS))
    cells = int(_merge(args, config, "cells", 4096))
    bins = int(_merge(args, config, "bins", 60))

    jobs = []
    preset_arg = _merge(args, config, "preset")
    if preset_arg:
        for name in str(preset_arg).split(","):
            name = name.strip()
            if name not in presets.DIST_PRESETS:
                raise ConfigError(
                    f"unknown preset {name!r}; known: "
                    f"{sorted(presets.DIST_PRESETS)}")
            ps = presets.DIST_PRESETS[name]
            jobs.append((name, ps["a"], ps["p"], ps["x"]))
    elif _merge(args, config, "a") is not None:
        a = float(_merge(args, config, "a"))
        p = _parse_triple(_merge(args, config, "p"), "p")
        x_val = _merge(args, config, "x")
        if x_val is None:
            raise ConfigError("field x is required")
        jobs.append(("dist", a, p, float(x_val)))
    else:
        raise ConfigError("need --preset or explicit a/p/x parameters")

    for name, a, p, x in jobs:
        _write_dist_set(name, a, p, x, out, seed, trials, cells, bins)
    print(f"wrote {len(jobs)} parameter set(s) to {out}")
    return 0


_MOMENT_KEYS = ("preset", "p", "T", "order", "init_lo", "init_hi", "t_list",
                "mc_trials", "hist_ts", "bins", "seed", "out")


def cmd_moments(args):
    config = _load_config(args.config, _MOMENT_KEYS)
    out = _outdir(args, config)
    seed = int(_merge(args, config, "seed", DEFAULT_SEED))

    name = "moments"
    hist_ts = ()
    preset_arg = _merge(args, config, "preset")
    if preset_arg:
        name = str(preset_arg).strip()
        if name not in presets.MOMENT_PRESETS:
            raise ConfigError(f"unknown preset {name!r}; known: "
                              f"{sorted(presets.MOMENT_PRESETS)}")
        ps = presets.MOMENT_PRESETS[name]
        p = ps["p"]
        T = int(_merge(args, config, "T", ps["T"]))
        init_lo, init_hi = ps["init"]
        t_list = ps.get("t_list", presets.TABLE2_T_VALUES)
        hist_ts = ps.get("hist_ts", ())
    else:
        p_val = _merge(args, config, "p")
        if p_val is None:
            raise ConfigError("need --preset or --p")
        p = _parse_triple(p_val, "p")
        T = int(_merge(args, config, "T", 50))
        init_lo = float(_merge(args, config, "init_lo", -4.0))
        init_hi = float(_merge(args, config, "init_hi", 4.0))
        t_list = _merge(args, config, "t_list", presets.TABLE2_T_VALUES)
        if isinstance(t_list, str):
            t_list = [int(v) for v in t_list.replace(",", " ").split()]
    order = int(_merge(args, config, "order", 2))
    if order < 2 or order % 2:
        raise ConfigError(f"field order must be a positive even number, got {order}")
    if T < 2:
        raise ConfigError(f"field T must be at least 2, got {T}")

    traj = moment_trajectory(order, p, T, init_lo, init_hi)
    traj.to_csv(out / f"{name}_trajectory.csv")
    write_gap_table(gap_table(p, t_list, init_lo, init_hi),
                    out / f"{name}_gaps.csv")

    hist_arg = _merge(args, config, "hist_ts")
    if hist_arg:
        hist_ts = [int(v) for v in str(hist_arg).replace(",", " ").split()]
    bad_ts = [t for t in hist_ts if not 1 <= t <= T]
    if bad_ts:
        raise ConfigError(f"field hist_ts outside 1..{T}: {bad_ts}")
    bins = int(_merge(args, config, "bins", 80))

    mc_trials = int(_merge(args, config, "mc_trials", 0))
    if mc_trials > 0:
        cfg = SimConfig(p=p, T=T, trials=mc_trials, init_lo=init_lo,
                        init_hi=init_hi, seed=seed)
        st = simulate_stagnation(cfg, keep_samples=bool(hist_ts) or None)
        st.to_csv(out / f"{name}_mc.csv")
        for t in hist_ts:
            Histogram.from_samples(st.row(t), bins=bins).to_csv(
                out / f"{name}_hist_t{t}.csv")
    print(f"wrote moment tables for {name} to {out}")
    return 0


_VERIFY_KEYS = ("seed", "trials", "workers", "out")


def cmd_verify(args):
    config = _load_config(args.config, _VERIFY_KEYS)
    out = _outdir(args, config)
    seed = int(_merge(args, config, "seed", DEFAULT_SEED))
    trials = int(_merge(args, config, "trials", DEFAULT_TRIALS))
    workers = int(_merge(args, config, "workers", 1))
    if trials < 1:
        raise ConfigError(f"field trials must be positive, got {trials}")

    report = run_acceptance(seed=seed, trials=trials, workers=workers)
    report.to_json(out / "report.json")
    for check in report.checks:
        status = "PASS" if check["passed"] else "FAIL"
        limit = f" (limit {check['limit']:g}s)" if check["limit"] else ""
        print(f"{status}  {check['name']:<20s} {check['elapsed']:7.2f}s{limit}")
    if report.config["low_power"]:
        print(f"note: low-power run ({trials} trials); gates widened")
    print(f"report: {out / 'report.json'}")
    return 0 if report.all_passed else 1


_OPT_KEYS = ("objective", "dim", "agents", "iters", "seed", "clamp",
             "workers", "out")


def cmd_optimize(args):
    config = _load_config(args.config, _OPT_KEYS)
    out = _outdir(args, config)
    name = str(_merge(args, config, "objective", "sphere"))
    dim = int(_merge(args, config, "dim", 10))
    agents = int(_merge(args, config, "agents", 30))
    iters = int(_merge(args, config, "iters", 500))
    seed = int(_merge(args, config, "seed", DEFAULT_SEED))
    workers = int(_merge(args, config, "workers", 1))
    clamp = bool(_merge(args, config, "clamp", False))

    try:
        objective = make_objective(name, dim)
        result = run_gwo(objective, agents, iters, seed, clamp=clamp,
                         workers=workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    trace_path = out / f"{name}_trace.csv"
    with trace_path.open("w", newline="") as fh:
        fh.write("t,best_f\n")
        for t, f in enumerate(result.trace, start=1):
            fh.write(f"{t},{f:.17g}\n")
    solution = {
        "objective": name, "dim": dim, "agents": agents, "iters": iters,
        "seed": seed, "clamp": clamp,
        "initial_fitness": result.initial_fitness,
        "best_fitness": result.best_fitness,
        "best_position": result.best_position.tolist(),
    }
    (out / f"{name}_solution.json").write_text(json.dumps(solution, indent=2))
    print(f"{name}: f {result.initial_fitness:.6g} -> {result.best_fitness:.6g}"
          f" ({iters} iterations); wrote {trace_path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gwolf",
        description="Grey wolf optimizer analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", help="Analytic curves and MC histograms")
    d.add_argument("--preset", help="comma-separated preset names "
                   "(fig4a..fig4d, fig6a..fig6h, fig8)")
    d.add_argument("--a", type=float, dest="a")
    d.add_argument("--p", help="leader value(s): one or three numbers")
    d.add_argument("--x", type=float, dest="x")
    d.add_argument("--bins", type=int)
    d.add_argument("--cells", type=int)
    d.set_defaults(func=cmd_dist)

    m = sub.add_parser("moments", help="Moment trajectories and gap tables")
    m.add_argument("--preset", help="preset name (fig9, fig11a, fig11b, table2)")
    m.add_argument("--p", help="leader triple, e.g. '-1,1.5,2.5'")
    m.add_argument("--T", type=int, dest="T")
    m.add_argument("--order", type=int)
    m.add_argument("--init-lo", type=float, dest="init_lo")
    m.add_argument("--init-hi", type=float, dest="init_hi")
    m.add_argument("--t-list", dest="t_list",
                   help="horizons for the gap table, e.g. '20,30,50'")
    m.add_argument("--mc-trials", type=int, dest="mc_trials",
                   help="also write an MC trace with this many trials")
    m.add_argument("--hist-ts", dest="hist_ts",
                   help="iterations to histogram from the MC run, e.g. '2,5,10'")
    m.add_argument("--bins", type=int, help="histogram bins (default 80)")
    m.set_defaults(func=cmd_moments)

    v = sub.add_parser("verify", help="Run the verification suite")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("optimize", help="Run the optimizer")
    o.add_argument("--objective", choices=objective_names())
    o.add_argument("--dim", type=int)
    o.add_argument("--agents", type=int)
    o.add_argument("--iters", type=int)
    o.add_argument("--clamp", action="store_const", const=True, default=None)
    o.set_defaults(func=cmd_optimize)

    for p in (d, m, v, o):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--trials", type=int)
        p.add_argument("--workers", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MemoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
