"""qpot command line: static functional, fluctuation paths, relaxation, action, verification.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance as AC
from . import action as A
from . import checks as C
from . import model as M
from . import staticfn as SF
from .fields import FieldError, Profile, SpaceTimeField
from .paths import PathError, build_path, build_path_shock_regime, stationary_target
from .solver import solve_ibvp


class InputError(ValueError):
    pass


# input ------------------------------------------------------------------------

def load_config(path):
    """Model descriptor plus run parameters; the spec (rho_l, rho_r) is required."""
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read config {path}: {e}") from e
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    try:
        em, spec = M.load_model(cfg)
    except (M.ModelError, M.DomainError, ValueError, TypeError) as e:
        raise InputError(str(e)) from e
    if spec is None:
        raise InputError("config needs rho_l and rho_r")
    return cfg, em, spec


def read_profile(path):
    """Profile CSV: a 'rho' column (with optional 'x'), or a single bare column."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read profile {path}: {e}") from e
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError("empty profile CSV")
    head = [c.strip().lower() for c in rows[0]]
    col = 0
    if "rho" in head:
        col, rows = head.index("rho"), rows[1:]
    try:
        vals = np.array([float(r[col]) for r in rows])
        return Profile(vals)
    except (ValueError, IndexError, FieldError) as e:
        raise InputError(f"bad profile CSV: {e}") from e


def read_field(path):
    try:
        with open(path) as fh:
            return SpaceTimeField.from_csv(fh)
    except (OSError, ValueError, FieldError) as e:
        raise InputError(f"bad field CSV: {e}") from e


def threads_from(args):
    n = args.threads if args.threads is not None else int(os.environ.get("QPOT_THREADS", "1"))
    if n < 1:
        raise InputError("thread count must be positive")
    return n


# output -----------------------------------------------------------------------

def _jsonable(o):
    if isinstance(o, dict):
        return {k: _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (np.floating, float)):
        return None if not math.isfinite(float(o)) else float(o)
    if isinstance(o, np.integer):
        return int(o)
    return o


def emit(obj):
    print(json.dumps(_jsonable(obj), indent=2))


def write_field(fld, path):
    with open(path, "w", newline="") as fh:
        fld.to_csv(fh)


def plot_field(fld, path, K, title=""):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(fld.frames, origin="lower", aspect="auto", cmap="viridis", vmin=0.0, vmax=K,
                   extent=(0.0, 1.0, fld.t0, fld.t1))
    ax.set_xlabel("x")
    ax.set_ylabel("t")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="rho")
    fig.savefig(path, format="svg")
    plt.close(fig)


def _suffixed(path, i):
    p = Path(path)
    return str(p.with_name(f"{p.stem}_{i}{p.suffix}"))


# commands ---------------------------------------------------------------------

def cmd_static(args):
    _, em, spec = load_config(args.config)
    rho = read_profile(args.profile)
    try:
        S = SF.quasi_potential_static(em, rho, spec)
    except (M.DomainError, ValueError) as e:
        raise InputError(str(e)) from e
    out = {"S": S, "phase": spec.phase, "rho_l": spec.rho_l, "rho_r": spec.rho_r, "n_cells": rho.n_cells}
    if spec.rho_l < spec.rho_r:
        sm = SF.S_shock_min(em, rho, spec)
        out.update(regime="shock", Y=[list(iv) for iv in sm.intervals], y=sm.y)
    else:
        out.update(regime="rarefaction", F=SF.optimal_F(em, rho, spec).values)
        ties = SF.optimal_F_ties(em, rho, spec)
        if ties:
            out["warnings"] = [f"optimal F not unique at cell resolution ({ties} tied moves)"]
    emit(out)
    return 0


def _representatives(em, rho, spec):
    """Ends and midpoints of the minimizing intervals, without repeats."""
    ys = []
    for a, b in SF.S_shock_min(em, rho, spec).intervals:
        for y in (a, 0.5 * (a + b), b):
            if not any(abs(y - z) < 1e-12 for z in ys):
                ys.append(float(y))
    return ys


def cmd_path(args):
    cfg, em, spec = load_config(args.config)
    rho = read_profile(args.profile)
    horizon = args.horizon if args.horizon is not None else cfg.get("horizon")
    cfl = float(cfg.get("cfl", 0.9))
    if args.enumerate_y and spec.rho_l >= spec.rho_r:
        raise InputError("--enumerate-y needs the shock regime (rho_l < rho_r)")
    if args.enumerate_y:
        ys = _representatives(em, rho, spec)
        jobs = lambda y: build_path_shock_regime(em, rho, y, spec, horizon, cfl)
        results = AC._map(jobs, ys, threads_from(args))
    else:
        y = args.y
        try:
            results = [build_path(em, rho, spec, y=y, horizon=horizon, cfl=cfl)]
        except PathError as e:
            raise InputError(str(e)) from e
    summaries = []
    for i, res in enumerate(results):
        s = res.summary()
        if args.out:
            p = args.out if len(results) == 1 else _suffixed(args.out, i)
            write_field(res.field, p)
            s["csv"] = p
        if args.plot:
            p = args.plot if len(results) == 1 else _suffixed(args.plot, i)
            plot_field(res.field, p, em.capacity, f"{spec.phase} path")
            s["svg"] = p
        summaries.append(s)
    emit(summaries if args.enumerate_y else summaries[0])
    return 0


def cmd_relax(args):
    cfg, em, spec = load_config(args.config)
    n = int(cfg.get("n_cells", 200))
    if args.profile:
        rho = read_profile(args.profile).values
    else:
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        k = rng.integers(1, 6)
        vals = rng.uniform(0.02, 0.98, k) * em.capacity
        cuts = np.sort(rng.uniform(0.0, 1.0, k - 1))
        rho = vals[np.searchsorted(cuts, (np.arange(n) + 0.5) / n)]
    horizon = args.horizon if args.horizon is not None else float(cfg.get("horizon", 10.0))
    fld = solve_ibvp(em, rho, spec.rho_l, spec.rho_r, horizon, cfl=float(cfg.get("cfl", 0.9)))
    # relaxation time: first entry into the stationary set for good, seen backwards from the end
    rev = SpaceTimeField(fld.frames[::-1], fld.dt, -fld.t1)
    _, T = stationary_target(em, rev, spec, args.tol)
    out = {"phase": spec.phase, "n_cells": fld.n_cells, "horizon": horizon,
           "finite_time": T is not None, "relaxation_time": T}
    if args.out:
        write_field(fld, args.out)
        out["csv"] = args.out
    if args.plot:
        plot_field(fld, args.plot, em.capacity, f"{spec.phase} relaxation")
        out["svg"] = args.plot
    emit(out)
    return 0


def cmd_action(args):
    _, em, spec = load_config(args.config)
    fld = read_field(args.field)
    sums = A.production_sums(em, fld)
    tot = A.total_action(em, fld, spec, sums=sums)
    out = tot.as_dict()
    out.update(j0=sums.j0, negative=sums.negative)
    if args.sampler:
        out["sampler_bound"] = A.sampler_bound(em, fld, spec)
    emit(out)
    return 0


def cmd_verify(args):
    names = list(AC.CRITERIA) if args.suite == "all" else [args.suite]
    threads = threads_from(args)
    results = []
    for name in names:
        if name in ("involution", "inequalities") and args.config:
            _, em, _ = load_config(args.config)
            rs = AC.model_invariants([em]) if name == "involution" else AC.inequalities([em])
        else:
            rs = AC.run_suite(name, threads)
        ok = C.all_ok(rs)
        results.append((name, ok))
        print(f"[{name}] {'PASS' if ok else 'FAIL'}")
        for r in rs:
            print("  " + r.line())
    print()
    width = max(len(n) for n, _ in results)
    for name, ok in results:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}")
    return 0 if all(ok for _, ok in results) else 1


# parser -----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="qpot", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="worker cap (default QPOT_THREADS or 1)")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("static", help="static functional S of a profile")
    s.add_argument("config")
    s.add_argument("profile")
    s.set_defaults(fn=cmd_static)

    s = sub.add_parser("path", help="construct the fluctuation path to a profile")
    s.add_argument("config")
    s.add_argument("profile")
    s.add_argument("--y", type=float, default=None, help="shock position (shock regime)")
    s.add_argument("--enumerate-y", action="store_true", help="one path per minimizer representative")
    s.add_argument("--horizon", type=float, default=None)
    s.add_argument("--out", help="CSV t,x,rho of the path")
    s.add_argument("--plot", help="SVG heatmap of the path")
    s.set_defaults(fn=cmd_path)

    s = sub.add_parser("relax", help="entropy solution from data, with relaxation time")
    s.add_argument("config")
    s.add_argument("--profile", help="initial profile CSV (default: random from the config seed)")
    s.add_argument("--horizon", type=float, default=None)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--out")
    s.add_argument("--plot")
    s.set_defaults(fn=cmd_relax)

    s = sub.add_parser("action", help="action of a space-time field")
    s.add_argument("config")
    s.add_argument("field", help="CSV t,x,rho")
    s.add_argument("--sampler", action="store_true", help="also report the sampler lower bound")
    s.set_defaults(fn=cmd_action)

    s = sub.add_parser("verify", help="run verification suites")
    s.add_argument("--suite", default="all", choices=["all", *AC.CRITERIA])
    s.add_argument("--config", help="model for the involution and inequality suites")
    s.set_defaults(fn=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.fn(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
