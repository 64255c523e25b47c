"""Entropy solutions on (0, 1) with BLN data, and exact formulas for special data."""
from __future__ import annotations

import math

import numpy as np

from .fields import Profile, SpaceTimeField, as_values


class PreconditionError(ValueError):
    pass


def _flux_of(model):
    return getattr(model, "flux", model)


def godunov_flux(model, a, b):
    """Exact Riemann flux for a concave f: min over [a, b] or max over [b, a]."""
    fl = _flux_of(model)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    up = np.minimum(fl.f(a), fl.f(b))
    down = fl.f(np.clip(fl.rho_star, b, a))
    out = np.where(a <= b, up, down)
    return out if out.ndim else float(out)


def _data_fn(d):
    if callable(d):
        return d
    val = float(d)
    return lambda t: val


def stable_dt(model, dx, horizon, cfl=0.9):
    fl = _flux_of(model)
    base = cfl * dx / fl.speed_bound
    n = max(1, math.ceil(horizon / base - 1e-12))
    return horizon / n, n


def godunov_run(model, u0, dx, dt, n_steps, left, right, t0=0.0, keep=True, log_flux=False):
    """March the Godunov scheme; left/right are ghost values (constants or t -> value).

    Returns the frames (n_steps + 1, n) if keep, else only the last frame.
    With log_flux also the boundary fluxes (F_in, F_out) per step.
    """
    fl = _flux_of(model)
    f, rs = fl.f, fl.rho_star
    u = np.array(u0, dtype=float)
    lf, rf = _data_fn(left), _data_fn(right)
    lam = dt / dx
    frames = np.empty((n_steps + 1, u.size)) if keep else None
    if keep:
        frames[0] = u
    fluxes = np.empty((n_steps, 2)) if log_flux else None
    ext = np.empty(u.size + 2)
    for n in range(n_steps):
        t = t0 + n * dt
        ext[0] = lf(t)
        ext[-1] = rf(t)
        ext[1:-1] = u
        a, b = ext[:-1], ext[1:]
        fa, fb = f(a), f(b)
        F = np.where(a <= b, np.minimum(fa, fb), f(np.clip(rs, b, a)))
        u = u - lam * (F[1:] - F[:-1])
        if keep:
            frames[n + 1] = u
        if log_flux:
            fluxes[n] = (F[0], F[-1])
    out = frames if keep else u
    return (out, fluxes) if log_flux else out


def solve_ibvp(model, rho0, left_data, right_data, horizon, cfl=0.9, dt=None, t0=0.0):
    """Godunov evolution on (0, 1) with ghost cells holding the BLN data."""
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    u0 = as_values(rho0)
    dx = 1.0 / u0.size
    if dt is None:
        dt, n = stable_dt(model, dx, horizon, cfl)
    else:
        fl = _flux_of(model)
        if dt * fl.speed_bound / dx > 1.0 + 1e-12:
            raise ValueError("time step violates the CFL condition")
        n = max(1, int(round(horizon / dt)))
    frames, fluxes = godunov_run(model, u0, dx, dt, n, left_data, right_data, t0=t0, log_flux=True)
    return SpaceTimeField(frames, dt, t0, meta={"boundary_flux": fluxes})


def traces(field):
    """Discrete boundary traces: first and last interior cells."""
    return field.frames[:, 0], field.frames[:, -1]


# Hopf formula ----------------------------------------------------------------

def _sup_hopf(fl, knots, vals, cum, x, t, tail_left=None, tail_right=None):
    """sup_y [R0(y) + t f*((x-y)/t)] for piecewise linear R0, f* concave.

    knots: cell edges, vals: cell values, cum: R0 at knots. Optional tails
    extend R0 linearly with the given slope outside [knots[0], knots[-1]].
    Returns (value, argmax y); ties go to the leftmost y.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    fstar = fl.f_conj_concave
    smin, smax = -fl.speed_bound, fl.speed_bound
    slo, shi = float(fl.fprime(fl.capacity)), float(fl.fprime(0.0))
    # candidate y: knots and per-cell critical points y = x - t f'(c)
    crit = x[:, None] - t * fl.fprime(vals)[None, :]
    inside = (crit > knots[None, :-1]) & (crit < knots[None, 1:])
    cand_y = [np.broadcast_to(knots, (x.size, knots.size))]
    cand_v = [np.broadcast_to(cum, (x.size, knots.size))]
    ycrit = np.where(inside, crit, knots[None, :-1])
    vcrit = cum[None, :-1] + vals[None, :] * (ycrit - knots[None, :-1])
    cand_y.append(ycrit)
    cand_v.append(np.where(inside, vcrit, -np.inf))
    for tail, edge, side in ((tail_left, knots[0], -1), (tail_right, knots[-1], 1)):
        if tail is None:
            continue
        y = x - t * float(fl.fprime(tail))
        ok = (y - edge) * side > 0
        y = np.where(ok, y, edge)
        e_val = cum[0] if side < 0 else cum[-1]
        cand_y.append(y[:, None])
        cand_v.append(np.where(ok, e_val + tail * (y - edge), -np.inf)[:, None])
    Y = np.concatenate(cand_y, axis=1)
    V = np.concatenate(cand_v, axis=1)
    theta = (x[:, None] - Y) / t
    valid = (theta >= slo - 1e-12) & (theta <= shi + 1e-12) & np.isfinite(V)
    H = np.where(valid, V + t * fstar(np.clip(theta, smin, smax)), -np.inf)
    best = H.max(axis=1)
    # leftmost among (numerical) ties
    tie = H >= best[:, None] - 1e-13 * max(1.0, np.max(np.abs(best[np.isfinite(best)]), initial=1.0))
    ystar = np.where(tie, Y, np.inf).min(axis=1)
    return best, ystar


def hopf_half_line(model, u0, r, rho, t, x, length=None):
    """Entropy solution u(t, x) on R from u0 = r on (-inf, 0), u0 on (0, L), rho beyond.

    u0 is a Profile (or array) of cell values on (0, L), L = length or 1.
    """
    fl = _flux_of(model)
    vals = as_values(u0)
    L = 1.0 if length is None else float(length)
    if not (0.0 <= r <= rho <= fl.capacity):
        raise PreconditionError("need 0 <= r <= rho <= K")
    knots = np.linspace(0.0, L, vals.size + 1)
    cum = np.concatenate([[0.0], np.cumsum(vals) * (L / vals.size)])
    if np.any(cum[1:] > rho * knots[1:] + 1e-12):
        raise PreconditionError("initial datum violates int_0^x u0 <= rho x")
    if t <= 0:
        raise PreconditionError("t must be positive")
    # Hopf uses U0 = -R0 and an infimum; equivalently a supremum with concave f*
    _, y = _sup_hopf(fl, knots, vals, cum, x, t, tail_left=r, tail_right=rho)
    out = fl.fprime_inv((np.atleast_1d(x) - y) / t)
    return float(out[0]) if np.ndim(x) == 0 else out


def hopf_value(model, R0_knots, R0_vals, x, t):
    """Cauchy Hopf-Lax value sup_y [R0(y) + t f*((x-y)/t)] with y over the knots range."""
    fl = _flux_of(model)
    knots = np.asarray(R0_knots, dtype=float)
    vals = np.asarray(R0_vals, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(vals * np.diff(knots))])
    return _sup_hopf(fl, knots, vals, cum, x, t)[0]


# characteristics for nonincreasing data ------------------------------------

def characteristics_monotone(model, G0, t, x, ext_left=None, ext_right=None):
    """Exact solution from a nonincreasing piecewise constant datum on (0, 1).

    The datum is extended by ext_left on (-inf, 0) and ext_right on (1, inf)
    (defaults: first and last cell values). No shocks form, so each x is reached
    by a characteristic from a cell or by a fan from a knot.
    """
    fl = _flux_of(model)
    g = as_values(G0)
    eL = g[0] if ext_left is None else float(ext_left)
    eR = g[-1] if ext_right is None else float(ext_right)
    full = np.concatenate([[eL], g, [eR]])
    if np.any(np.diff(full) > 1e-12):
        raise PreconditionError("datum is not nonincreasing")
    x = np.asarray(x, dtype=float)
    if t <= 0:
        idx = np.clip(np.floor(x * g.size).astype(int), -1, g.size)
        return full[idx + 1]
    n = g.size
    knots = np.linspace(0.0, 1.0, n + 1)
    s = fl.fprime(full)  # nondecreasing speeds
    # breakpoints: fan at knot j spans [knot_j + t s_j, knot_j + t s_{j+1}] (s over full)
    fan_lo = knots + t * s[:-1]
    fan_hi = knots + t * s[1:]
    xs = np.atleast_1d(x)
    j = np.searchsorted(fan_lo, xs, side="right") - 1  # last knot with fan_lo <= x
    out = np.empty(xs.shape)
    before = j < 0
    out[before] = eL
    jj = np.clip(j, 0, n)
    in_fan = ~before & (xs <= fan_hi[jj])
    out[in_fan] = fl.fprime_inv((xs[in_fan] - knots[jj[in_fan]]) / t)
    const = ~before & ~in_fan
    out[const] = full[jj[const] + 1]
    return float(out[0]) if np.ndim(x) == 0 else out


# boundary variational formula ---------------------------------------------

def jvg_value(model, R0, left_data, right_data, t, x, n_time=None):
    """R(t, x) from the variational formula with boundary dwell costs.

    R0 is a Profile (cell values of rho(0, .)). Paths are piecewise linear:
    a free straight segment from the initial line, then alternating dwells on
    the boundaries and straight crossings on a time grid, then a last straight
    segment to x. The boundary data may depend on time.
    """
    fl = _flux_of(model)
    vals = as_values(R0)
    n = vals.size
    knots = np.linspace(0.0, 1.0, n + 1)
    cum = np.concatenate([[0.0], np.cumsum(vals) / n])
    x = np.atleast_1d(np.asarray(x, dtype=float))
    M = n_time or max(64, 2 * n)
    s = np.linspace(0.0, t, M + 1)
    ds = t / M
    lf, rf = _data_fn(left_data), _data_fn(right_data)
    rs = fl.rho_star
    # dwell cost rates at the grid midpoints, cumulated
    mid = s[:-1] + 0.5 * ds
    c0 = np.array([float(fl.f(min(lf(u), rs))) for u in mid])
    c1 = np.array([float(fl.f(max(rf(u), rs))) for u in mid])
    C = np.stack([np.concatenate([[0.0], np.cumsum(c0) * ds]),
                  np.concatenate([[0.0], np.cumsum(c1) * ds])])
    fstar = fl.f_conj_concave
    vmax = fl.speed_bound
    A = np.full((2, M + 1), -np.inf)
    A[0, 0], A[1, 0] = cum[0], cum[-1]
    # first arrival at a boundary straight from the initial line
    for k in range(1, M + 1):
        A[0, k] = _sup_hopf(fl, knots, vals, cum, np.array([0.0]), s[k])[0][0]
        A[1, k] = _sup_hopf(fl, knots, vals, cum, np.array([1.0]), s[k])[0][0]
    best_dwell = np.array([A[0, 0] + C[0, 0], A[1, 0] + C[1, 0]])
    for k in range(1, M + 1):
        for b in (0, 1):
            cand = best_dwell[b] - C[b, k]
            # crossings from the other boundary that left at s_j
            dt_ = s[k] - s[:k]
            ok = dt_ * vmax >= 1.0 - 1e-12
            if np.any(ok):
                theta = (1.0 if b == 1 else -1.0) / dt_[ok]
                cv = A[1 - b, :k][ok] + dt_[ok] * fstar(theta)
                cand = max(cand, cv.max())
            A[b, k] = max(A[b, k], cand)
        for b in (0, 1):
            best_dwell[b] = max(best_dwell[b], A[b, k] + C[b, k])
    # last leg: straight from the initial line, or from a boundary at time s_k < t
    val, _ = _sup_hopf(fl, knots, vals, cum, x, t)
    for b in (0, 1):
        dt_ = t - s[:-1]
        theta = (x[:, None] - b) / dt_[None, :]
        ok = np.abs(theta) <= vmax + 1e-12
        leg = np.where(ok, A[b, :-1][None, :] + dt_[None, :] * fstar(np.clip(theta, -vmax, vmax)), -np.inf)
        val = np.maximum(val, leg.max(axis=1))
        # sitting on the boundary until t (x at the boundary itself)
        at_b = np.abs(x - b) < 1e-15
        val = np.where(at_b, np.maximum(val, best_dwell[b] - C[b, -1]), val)
    return val


def jvg_density(model, R0, left_data, right_data, t, n_cells=None, n_time=None):
    """Cell averages of d/dx R(t, .) from jvg_value at the cell edges."""
    vals = as_values(R0)
    n = n_cells or vals.size
    edges = np.linspace(0.0, 1.0, n + 1)
    R = jvg_value(model, vals, left_data, right_data, t, edges, n_time=n_time)
    return np.diff(R) * n
