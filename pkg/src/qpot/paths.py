"""Optimal fluctuation paths, the space-time reversal and stationarity checks.

A path is built forward in reversed time: rho_tilde(t, x) = rho(-t, 1 - x)
is an entropy solution (plus a single antishock in the shock regime), and
the path is its reversal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .action import ActionBreakdown, total_action
from .fields import Profile, SpaceTimeField, as_values, l1_distance
from .model import stationary_set
from .solver import characteristics_monotone, godunov_run, stable_dt
from .staticfn import RegimeError, S_shock_min, optimal_F, tilde_G0


STATIONARY_TOL = 1e-6
MC_HORIZON = 16.0
MAX_HORIZON = 64.0
BLOCK_PAD = 16  # stationary frames kept ahead of -T
EXT_CELLS = 32  # extension on each side for the discrete G~


class PathError(ValueError):
    pass


def reverse(field):
    """(t, x) -> (-t, 1 - x); an involution on fields."""
    return SpaceTimeField(field.frames[::-1, ::-1].copy(), field.dt, -field.t1, dict(field.meta))


@dataclass
class PathResult:
    field: SpaceTimeField  # the path on (-T, 0)
    tilde: SpaceTimeField  # its reversal on (0, T)
    spec: object
    target: np.ndarray
    y_trajectory: object = None  # t -> y_t for t in (-T, 0), shock regime only
    theta_tilde: float = math.inf
    y: float | None = None
    action: ActionBreakdown | None = None
    finite_time: bool = False
    T: float | None = None
    meta: dict = field(default_factory=dict)

    def summary(self):
        out = {"phase": self.spec.phase, "rho_l": self.spec.rho_l, "rho_r": self.spec.rho_r,
               "n_cells": self.field.n_cells, "dt": self.field.dt, "horizon": -self.field.t0,
               "theta_tilde": None if math.isinf(self.theta_tilde) else self.theta_tilde,
               "y": self.y, "finite_time": self.finite_time, "T": self.T}
        if self.action is not None:
            out["action"] = self.action.as_dict()
        out.update({k: v for k, v in self.meta.items() if isinstance(v, (int, float, str, bool))})
        return out


# shock regime -------------------------------------------------------------------

def antishock_speed(em, spec):
    if spec.phase == "COEX":
        return 0.0  # f(rho_l) = f(rho_r); keep rounding from giving a drift
    return float(em.flux.shock_speed(em.phi(spec.rho_l), em.phi(spec.rho_r)))


def theta_tilde(ytil, v):
    if v > 0:
        return (1.0 - ytil) / v
    if v < 0:
        return -ytil / v
    return 0.0 if ytil in (0.0, 1.0) else math.inf


def final_boundary(em, spec, ytil):
    fl, fr = float(em.f(spec.rho_l)), float(em.f(spec.rho_r))
    tol = 1e-12 * em.flux.fmax
    if fl < fr - tol or (abs(fl - fr) <= tol and ytil <= 0.5):
        return 0.0, spec.rho_l
    return 1.0, spec.rho_r


def _stitch(plus, minus, z, n):
    """Cells left of the line from minus, right of it from plus, cut cell mixed."""
    edges = np.arange(n + 1) / n
    frac = np.clip((z - edges[:-1]) * n, 0.0, 1.0)
    return frac * minus + (1 - frac) * plus


def build_path_shock_regime(em, rho, y, spec, horizon=None, cfl=0.9, check_y=True, evaluate=True):
    if not spec.rho_l < spec.rho_r:
        raise RegimeError("shock-regime construction needs rho_l < rho_r")
    if horizon is None:
        return _adaptive(em, spec, evaluate, lambda H: build_path_shock_regime(
            em, rho, y, spec, H, cfl, check_y, evaluate=False))
    target = as_values(rho)
    n = target.size
    dx = 1.0 / n
    if check_y:
        mins = S_shock_min(em, target, spec)
        if not mins.contains(y, 0.5 * dx + 1e-12):
            raise PathError(f"y={y} is not a minimizer; minimizers start at {mins.y}")
    ytil = 1.0 - y
    v = antishock_speed(em, spec)
    th = theta_tilde(ytil, v)
    V = em.flux.speed_bound
    dt, n_steps = stable_dt(em, dx, horizon, cfl)
    pl, pr = float(em.phi(spec.rho_l)), float(em.phi(spec.rho_r))
    frames = np.empty((n_steps + 1, n))
    frames[0] = target[::-1]
    # per-side states; plus lives right of the line, minus left of it
    plus = frames[0].copy()
    minus = frames[0].copy()
    k = 0
    snapped = None
    ztraj = [(0.0, ytil)]
    if not (th == 0.0):
        while k < n_steps:
            t_n = k * dt
            z = ytil + v * t_n
            # stop once the line is within a cell of the boundary it is heading to
            if (z < dx and v <= 0) or (1.0 - z < dx and v >= 0):
                snapped = t_n
                break
            span = max(min(z / (V - v), (1.0 - z) / (V + v)), dx / V)
            m = max(1, min(n_steps - k, int(span / dt)))
            ghost = int(math.ceil(V * m * dt / dx)) + 2
            iz = int(math.floor(z * n))
            # "+" problem on (-inf, 1): phi(rho_r) left of the line, BLN datum rho_l at 1
            up = np.concatenate([np.full(ghost, pr), plus])
            up[ghost:ghost + iz] = pr
            fp = _run_free_left(em, up, dx, dt, m, spec.rho_l)
            # "-" problem on (0, inf): phi(rho_l) right of the line, BLN datum rho_r at 0
            dn = np.concatenate([minus, np.full(ghost, pl)])
            dn[iz + 1:n] = pl
            fm = _run_free_right(em, dn, dx, dt, m, spec.rho_r)
            for j in range(1, m + 1):
                zj = ytil + v * (t_n + j * dt)
                frames[k + j] = _stitch(fp[j, ghost:], fm[j, :n], zj, n)
                ztraj.append(((k + j) * dt, zj))
            plus = fp[m, ghost:].copy()
            minus = fm[m, :n].copy()
            k += m
        if snapped is None and not math.isinf(th):
            snapped = k * dt
    else:
        snapped = 0.0
    y_inf, rho_b = final_boundary(em, spec, ytil)
    if snapped is not None and k < n_steps:
        rest = godunov_run(em, frames[k], dx, dt, n_steps - k, rho_b, rho_b)
        frames[k:] = rest
    tilde = SpaceTimeField(frames, dt, 0.0)
    path = reverse(tilde)
    zt = np.array(ztraj)

    def y_traj(t):
        # y_t = 1 - tilde y_{-t}, frozen at the boundary after theta
        s = -np.asarray(t, dtype=float)
        z = np.clip(ytil + v * s, 0.0, 1.0) if not math.isinf(th) else np.full(np.shape(s), ytil)
        if not math.isinf(th):
            z = np.where(s >= th, y_inf, z)
        return 1.0 - z

    res = PathResult(path, tilde, spec, target, y_traj, th if snapped is None else snapped, y)
    res.meta.update({"v": v, "theta_exact": th, "rho_b": rho_b, "y_inf": y_inf})
    res.meta["line"] = zt
    if evaluate:
        _evaluate(em, res)
    return res


def _run_free_left(em, u0, dx, dt, m, right):
    """Godunov with a transmissive far-left end and ghost value `right` at x = 1."""
    return godunov_run(em, u0, dx, dt, m, float(u0[0]), right)


def _run_free_right(em, u0, dx, dt, m, left):
    return godunov_run(em, u0, dx, dt, m, left, float(u0[-1]))


# rarefaction regime ---------------------------------------------------------------

def G_tilde_field(em, rho, spec, times):
    """G~(t, x) at the cell centres for each time, plus its boundary values."""
    G0 = tilde_G0(em, rho, spec)
    n = G0.size
    x = (np.arange(n) + 0.5) / n
    eL, eR = float(em.phi(spec.rho_r)), float(em.phi(spec.rho_l))
    G = np.empty((len(times), n))
    g0 = np.empty(len(times))
    g1 = np.empty(len(times))
    for i, t in enumerate(times):
        if t <= 0:
            G[i] = G0
            g0[i], g1[i] = G0[0], G0[-1]
            continue
        vals = characteristics_monotone(em, G0, t, np.concatenate([x, [0.0, 1.0]]), eL, eR)
        G[i] = vals[:n]
        g0[i], g1[i] = vals[n], vals[n + 1]
    return G, g0, g1


def build_path_rarefaction_regime(em, rho, spec, horizon=None, cfl=0.9, evaluate=True, check_later=False):
    if not spec.rho_l >= spec.rho_r:
        raise RegimeError("rarefaction-regime construction needs rho_l >= rho_r")
    if horizon is None:
        res = _adaptive(em, spec, False, lambda H: build_path_rarefaction_regime(
            em, rho, spec, H, cfl, evaluate=False))
        if check_later:
            res.meta["later_F_error"] = later_F_error(em, res)
        if evaluate:
            _evaluate(em, res)
        return res
    target = as_values(rho)
    n = target.size
    dx = 1.0 / n
    dt, n_steps = stable_dt(em, dx, horizon, cfl)
    G0 = tilde_G0(em, target, spec)
    g0, g1 = _discrete_G_traces(em, G0, spec, dx, dt, n_steps)
    # the data phi(G~) are exactly flux-critical for traces equal to G~, and a
    # cell average overshooting that by O(dx) locks a one-cell stationary layer
    # against the wall; moving each datum dx towards rho* on its capping side
    # keeps the same limit solution without the layer
    rs = em.rho_star
    dl = np.asarray(em.phi(g0), dtype=float)
    dr = np.asarray(em.phi(g1), dtype=float)
    dl = np.where(dl < rs, np.minimum(dl + dx, rs), dl)
    dr = np.where(dr > rs, np.maximum(dr - dx, rs), dr)

    def left(t):
        return dl[min(int(round(t / dt)), n_steps)]

    def right(t):
        return dr[min(int(round(t / dt)), n_steps)]

    frames = godunov_run(em, target[::-1], dx, dt, n_steps, left, right)
    tilde = SpaceTimeField(frames, dt, 0.0, meta={"left_data": dl, "right_data": dr})
    path = reverse(tilde)
    res = PathResult(path, tilde, spec, target)
    if check_later:
        res.meta["later_F_error"] = later_F_error(em, res)
    if evaluate:
        _evaluate(em, res)
    return res


def _discrete_G_traces(em, G0, spec, dx, dt, n_steps, pad=EXT_CELLS):
    """Boundary-cell values of G~ evolved by the same Godunov scheme.

    G~ solves the Cauchy problem with phi(rho_r) on the left and phi(rho_l) on
    the right; outside the unit interval it only carries outgoing waves, so a
    short extension with transmissive ends reproduces it. Feeding the BLN data
    from the discrete G~ gives them the same smearing as the discrete rho~.
    """
    eL, eR = float(em.phi(spec.rho_r)), float(em.phi(spec.rho_l))
    u = np.concatenate([np.full(pad, eL), G0, np.full(pad, eR)])
    fr = _transmissive_run(em, u, dx, dt, n_steps)
    return fr[:, pad], fr[:, pad + G0.size - 1]


def _transmissive_run(em, u0, dx, dt, n_steps):
    f, rs = em.f, em.rho_star
    u = np.array(u0, dtype=float)
    frames = np.empty((n_steps + 1, u.size))
    frames[0] = u
    lam = dt / dx
    for k in range(n_steps):
        ext = np.concatenate([[u[0]], u, [u[-1]]])
        a, b = ext[:-1], ext[1:]
        F = np.where(a <= b, np.minimum(f(a), f(b)), f(np.clip(rs, b, a)))
        u = u - lam * (F[1:] - F[:-1])
        frames[k + 1] = u
    return frames


def later_F_error(em, res, n_checks=8):
    """Max over sampled frames of L1 | G~(t, .) - phi(F_{rho(-t, 1-.)}(1 - .)) |."""
    tilde, spec = res.tilde, res.spec
    idx = np.linspace(0, tilde.n_frames - 1, n_checks).astype(int)
    times = tilde.times[idx]
    G, _, _ = G_tilde_field(em, res.target, spec, times)
    worst = 0.0
    for i, k in enumerate(idx):
        prof = tilde.frames[k][::-1]  # rho(-t, .)
        F = optimal_F(em, prof, spec).values
        worst = max(worst, l1_distance(G[i], np.asarray(em.phi(F[::-1]))))
    return worst


# dispatch and stationarity ------------------------------------------------------

def build_path(em, rho, spec, y=None, horizon=None, cfl=0.9, evaluate=True):
    if spec.rho_l < spec.rho_r:
        if y is None:
            y = S_shock_min(em, as_values(rho), spec).y
        return build_path_shock_regime(em, rho, y, spec, horizon, cfl, evaluate=evaluate)
    return build_path_rarefaction_regime(em, rho, spec, horizon, cfl, evaluate=evaluate)


def stationary_distances(em, field, spec):
    ss = stationary_set(em, spec)
    return np.array([ss.distance(fr) for fr in field.frames])


def stationary_target(em, path, spec, tol=1e-6):
    """Earliest time -T at which the path sits in the stationary set for good.

    Returns (profile, T) or (closest profile, None) if the set is not reached.
    """
    field = path.field if isinstance(path, PathResult) else path
    d = stationary_distances(em, field, spec)
    inside = d <= tol
    if not inside[0]:
        return field.frames[int(np.argmin(d))], None
    # the path starts in the set at -horizon; find the last frame of that initial run
    k = int(np.argmin(inside)) - 1 if not inside.all() else field.n_frames - 1
    return field.frames[k], float(-field.times[k])


def _evaluate(em, res, tol=STATIONARY_TOL):
    res.action = total_action(em, res.field, res.spec)
    _, T = stationary_target(em, res, res.spec, tol)
    res.finite_time = T is not None
    res.T = T


def _trim(res, T, keep):
    """Drop leading stationary frames, keeping `keep` of them before -T."""
    f = res.field
    k0 = max(0, int(round((-T - f.t0) / f.dt)) - keep)
    if k0 == 0:
        return res
    res.field = SpaceTimeField(f.frames[k0:], f.dt, f.t0 + k0 * f.dt, f.meta)
    res.tilde = reverse(res.field)
    return res


def _adaptive(em, spec, evaluate, build, tol=STATIONARY_TOL):
    """Double the horizon until the path starts in the stationary set.

    In the MC phase the stationary profile is only reached asymptotically,
    so the search stops at MC_HORIZON.
    """
    H = 4.0
    while True:
        res = build(H)
        _, T = stationary_target(em, res, spec, tol)
        # require a stationary stretch at the start so that -T is resolved
        if T is not None and T < H - BLOCK_PAD * res.field.dt:
            res = _trim(res, T, BLOCK_PAD)
            break
        if (spec.phase == "MC" and H >= MC_HORIZON) or H >= MAX_HORIZON:
            break
        H *= 2
    if evaluate:
        _evaluate(em, res, tol)
    return res
