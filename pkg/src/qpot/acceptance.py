"""Quantitative acceptance suites, shared by the CLI verifier and the tests.

Every suite returns a list of CheckResult; see checks.all_ok.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import action as A
from . import checks as C
from . import model as M
from . import solver as S
from . import staticfn as SF
from .checks import CheckResult
from .fields import cell_centers
from .oracles import appendix_oracle, find_case
from .paths import build_path, reverse, stationary_distances, stationary_target

# scenario tables ----------------------------------------------------------------

PHASE_SPECS = {"LD": (0.2, 0.6), "HD": (0.4, 0.8), "MC": (0.8, 0.2), "COEX": (0.3, 0.7)}
TARGETS = (0.25, 0.5, 0.75)


def _coex(em, rl):
    return rl, float(em.phi(rl))


def oracle_scenarios():
    """(case, model, spec, rho, y); rho None means rho_c of the spec."""
    asep, cp, cm = M.asep(), M.cubic(0.25), M.cubic(-0.25)
    return [
        ("B.a", asep, (0.2, 0.6), 0.1, None), ("B.b", asep, (0.2, 0.6), 0.3, None),
        ("B.c", asep, (0.2, 0.4), 0.6, None), ("B.d", asep, (0.3, 0.7), 0.6, None),
        ("B.e", asep, (0.3, 0.7), 0.8, None), ("B.f", asep, (0.2, 0.4), 0.75, None),
        ("B.g", asep, (0.2, 0.6), 0.7, None), ("B.h", cp, _coex(cp, 0.2), None, 0.4),
        ("B.i", cm, (float(cm.phi(0.8)), 0.8), None, 0.4), ("B.j", asep, (0.3, 0.7), 0.5, 0.4),
        ("C.1.1", asep, (0.4, 0.2), 0.7, None), ("C.1.2", asep, (0.4, 0.2), 0.55, None),
        ("C.1.3", asep, (0.4, 0.2), 0.45, None), ("C.2.1", asep, (0.8, 0.2), 0.7, None),
        ("C.2.2", asep, (0.8, 0.2), 0.3, None), ("C.3.1", asep, (0.8, 0.6), 0.3, None),
        ("C.3.2", asep, (0.8, 0.6), 0.45, None), ("C.3.3", asep, (0.8, 0.6), 0.55, None),
    ]


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


def _timed(name, limit, t0):
    dt = time.perf_counter() - t0
    return CheckResult(name, dt < limit, dt, f"s (limit {limit:g} s)")


# 1, 2 ---------------------------------------------------------------------------

def model_invariants(models=None):
    t0 = time.perf_counter()
    out = []
    for em in models or (M.asep(), M.cubic(0.2)):
        for r in C.involution_suite(em, n=1000, tol=1e-8):
            r.name = f"{em.name}: {r.name}"
            out.append(r)
    out.append(_timed("model invariants runtime", 1.0, t0))
    return out


def inequalities(models=None):
    out = []
    for em in models or (M.asep(), M.cubic(0.2)):
        t0 = time.perf_counter()
        for r in C.inequality_suite(em, C.default_specs(em), n=200, tol=1e-9):
            r.name = f"{em.name}: {r.name}"
            out.append(r)
        out.append(_timed(f"{em.name}: inequality suite runtime", 30.0, t0))
    return out


# 3 ------------------------------------------------------------------------------

def closure(n_cells=400, threads=1, rel_tol=0.05):
    em = M.asep()
    jobs = [(ph, r) for ph in PHASE_SPECS for r in TARGETS]

    def run(job):
        ph, r = job
        spec = M.make_spec(em, *PHASE_SPECS[ph])
        rho = np.full(n_cells, r)
        Sv = SF.quasi_potential_static(em, rho, spec)
        res = build_path(em, rho, spec, cfl=0.9)
        err = abs(res.action.total - Sv)
        lim = rel_tol * max(Sv, 0.01)
        return CheckResult(f"S = action {ph} rho={r:g}", err <= lim, err,
                           f"(S {Sv:.5f}, action {res.action.total:.5f}, limit {lim:.2e})")

    t0 = time.perf_counter()
    out = _map(run, jobs, threads)
    out.append(_timed("closure runtime", 300.0, t0))
    return out


# 4 ------------------------------------------------------------------------------

def oracle_agreement(n_cells=800, times=(0.2, 1.0, 2.0), tol=0.02, threads=1):
    x = cell_centers(n_cells)

    def run(sc):
        cid, em, pair, rho, y = sc
        spec = M.make_spec(em, *pair)
        if rho is None:
            rho = M.rho_critical(em, spec)
        d = appendix_oracle(em, cid, rho, spec, y=y)
        res = build_path(em, np.full(n_cells, rho), spec, y=y, horizon=max(times) + 1.0, evaluate=False)
        errs = [float(np.mean(np.abs(res.tilde.frame_at(t) - d(t, x)))) for t in times]
        return CheckResult(f"oracle {cid}", max(errs) <= tol, max(errs), f"(L1 at t={list(times)}, tol {tol:g})")

    return _map(run, oracle_scenarios(), threads)


# 5 ------------------------------------------------------------------------------

def hopf_half_line_check(n_profiles=50, n_cells=200, tol=1e-8, seed=5):
    em = M.asep()
    rng = np.random.default_rng(seed)
    dx = 1.0 / n_cells
    xe = np.arange(1, n_cells + 1) / n_cells
    worst = 0.0
    for _ in range(n_profiles):
        rho = rng.uniform(0.2, 0.95)
        r = rng.uniform(0.02, rho)
        u = rng.uniform(0.0, 1.0, n_cells)
        # admissible: int_0^x u0 <= rho x on the edges
        u *= rho / max(rho, np.max(np.cumsum(u) * dx / xe))
        t = rng.uniform(0.2, 2.0)
        v = float(em.flux.shock_speed(r, rho))
        xs = np.linspace(t * v - 2 * dx - 1.0, t * v - 2 * dx, 200)
        worst = max(worst, float(np.max(np.abs(S.hopf_half_line(em, u, r, rho, t, xs) - r))))
    return [CheckResult("half-line Hopf solution equals r behind the shock", worst <= tol, worst,
                        f"({n_profiles} profiles, tol {tol:g})")]


# 6 ------------------------------------------------------------------------------

def envelope_optimality(n_profiles=100, n_cells=64, n_random=10_000, tol=-1e-9, seed=6):
    em = M.asep()
    rng = np.random.default_rng(seed)
    worst = np.inf
    for i in range(n_profiles):
        rl = rng.uniform(0.05, 0.95)
        rr = rng.uniform(0.02, rl)
        spec = M.make_spec(em, rl, rr)
        if i % 2:
            rho = rng.uniform(0.0, 1.0, n_cells)
        else:
            rho = rng.uniform(0.0, 1.0) + 0.1 * rng.standard_normal(n_cells)
        rho = np.clip(rho, 0.01, 0.99)
        best = SF.S_rarefaction(em, rho, SF.optimal_F(em, rho, spec), spec)
        Fs = SF.random_admissible_F(rng, n_cells, spec, n_random)
        worst = min(worst, best - float(np.max(SF.S_rarefaction_batch(em, rho, Fs, spec))))
    return [CheckResult("optimal F beats random admissible F", worst >= tol, worst,
                        f"(min margin over {n_profiles} profiles, tol {tol:g})")]


# 7 ------------------------------------------------------------------------------

def finite_time(n_cells=200, factor=1.5, transient=0.1):
    """Finite T against the explicit wave-diagram bound; MC relaxes only asymptotically.

    In the MC phase the uniform target rho* is itself stationary and is skipped.
    """
    em = M.asep()
    out = []
    for ph, pair in PHASE_SPECS.items():
        spec = M.make_spec(em, *pair)
        for r in TARGETS:
            if ph == "MC" and abs(r - em.rho_star) < 1e-12:
                continue
            res = build_path(em, np.full(n_cells, r), spec, evaluate=False)
            _, T = stationary_target(em, res, spec)
            name = f"finite time {ph} rho={r:g}"
            if ph == "MC":
                d = stationary_distances(em, res.tilde, spec)
                k = int(transient * d.size)
                rise = float(np.max(np.diff(d[k:])))
                ok = T is None and rise <= 0.0
                out.append(CheckResult(name, ok, rise, f"(T {T}, largest increase after transients)"))
                continue
            d = find_case(em, r, spec, y=res.y)
            tau = None if d is None else d.tau
            ok = T is not None and tau is not None and T <= factor * tau
            out.append(CheckResult(name, ok, np.nan if T is None else T,
                                   f"(bound {factor:g} x {tau} from {d.name if d else 'no case'})"))
    return out


# 8 ------------------------------------------------------------------------------

def action_ordering(size=50, seed=11, swap_tol=0.05):
    em = M.asep()
    corpus = C.field_corpus(em, np.random.default_rng(seed), size=size)
    bad_order, bad_sampler, worst_swap = 0, 0, 0.0
    for _, fld, spec in corpus:
        s = A.production_sums(em, fld)
        tot = A.total_action(em, fld, spec, sums=s)
        if not (s.j0 <= s.positive + 1e-12 and s.positive <= tot.total + 1e-12):
            bad_order += 1
        if A.sampler_bound(em, fld, spec) > tot.total + tot.floor:
            bad_sampler += 1
        sr = A.production_sums(em, reverse(fld))
        for a, b in ((sr.positive, s.negative), (sr.negative, s.positive)):
            worst_swap = max(worst_swap, abs(a - b) / max(abs(b), 1e-12))
    return [
        CheckResult("j0 <= bulk <= total", bad_order == 0, bad_order, f"violations of {size}"),
        CheckResult("sampler bound <= total + floor", bad_sampler == 0, bad_sampler, f"violations of {size}"),
        CheckResult("reversal swaps residual masses", worst_swap <= swap_tol, worst_swap,
                    f"(largest relative mismatch, tol {swap_tol:g})"),
    ]


# 9 ------------------------------------------------------------------------------

def cross_solver(n_cells=400, seed=1, n_random=4):
    em = M.asep()
    dx = 1.0 / n_cells
    x = cell_centers(n_cells)
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n_random):
        vals = np.sort(rng.uniform(0.05, 0.95, rng.integers(2, 6)))[::-1]
        cuts = np.sort(rng.uniform(0.0, 1.0, vals.size - 1))
        G = vals[np.searchsorted(cuts, x)]
        T = rng.uniform(0.3, 1.5)

        # ghost data: the exact solution just outside the domain
        def left(t, G=G):
            return S.characteristics_monotone(em, G, t, -0.5 * dx) if t > 0 else G[0]

        def right(t, G=G):
            return S.characteristics_monotone(em, G, t, 1.0 + 0.5 * dx) if t > 0 else G[-1]

        g = S.solve_ibvp(em, G, left, right, T).frames[-1]
        e = float(np.mean(np.abs(g - S.characteristics_monotone(em, G, T, x))))
        out.append(CheckResult(f"Godunov vs characteristics #{k}", e <= 2 * dx, e / dx, "dx (tol 2 dx)"))
    for rl, rr, u0 in ((0.2, 0.6, np.full(n_cells, 0.4)),
                       (0.6, 0.2, np.where(x < 0.5, 0.7, 0.3)),
                       (0.8, 0.3, np.where(x < 0.5, 0.7, 0.3))):
        g = S.solve_ibvp(em, u0, rl, rr, 1.0).frames[-1]
        e = float(np.mean(np.abs(g - S.jvg_density(em, u0, rl, rr, 1.0))))
        out.append(CheckResult(f"Godunov vs Hopf-derived density [{rl:g},{rr:g}]", e <= 2 * dx, e / dx,
                               "dx (tol 2 dx)"))
    return out


CRITERIA = {
    "involution": model_invariants,
    "inequalities": inequalities,
    "closure": closure,
    "oracles": oracle_agreement,
    "hopf": hopf_half_line_check,
    "envelope": envelope_optimality,
    "finite-time": finite_time,
    "ordering": action_ordering,
    "cross-solver": cross_solver,
}
THREADED = ("closure", "oracles")


def run_suite(name, threads=1):
    fn = CRITERIA[name]
    return fn(threads=threads) if name in THREADED else fn()
